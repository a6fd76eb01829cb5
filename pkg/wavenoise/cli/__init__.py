from wavenoise.cli.commands import COMMANDS

__all__ = ["COMMANDS"]
