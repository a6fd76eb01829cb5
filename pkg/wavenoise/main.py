# wavenoise/main.py
"""
Command-line entry point
Flags are layered over an optional resolved config file, validated into a
RunConfig, dispatched to a subcommand, and the resolved config is written
next to the outputs. Failures print a JSON error document on stderr.
"""
import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional

from pydantic import ValidationError

from wavenoise.cli.commands import COMMANDS
from wavenoise.core.config import settings
from wavenoise.core.errors import ConfigValidationError, InputFileError, WavenoiseError, validation_messages
from wavenoise.schemas.run_config import RunConfig
from wavenoise.utils.file_handler import read_json, write_json

logger = logging.getLogger(__name__)

NORMALIZATION_FLAGS = {
    "literal": "literal",
    "paper": "literal",
    "paper_exact": "literal",
    "unit": "unit_norm",
    "unit_norm": "unit_norm",
}

# flags whose values are file paths, resolved so a written config replays from any directory
PATH_FIELDS = ("inputs", "out", "recipe")


class RunArgumentParser(argparse.ArgumentParser):
    """Reports bad flags as a config error instead of exiting with usage text"""

    def error(self, message: str):
        raise ConfigValidationError(f"{self.prog}: {message}", {"usage": self.format_usage().strip()})


def configure_logging(level: Optional[str] = None) -> None:
    """Single stderr handler for the whole package"""
    level = (level or settings.LOG_LEVEL).upper()
    root = logging.getLogger("wavenoise")
    for handler in list(root.handlers):
        root.removeHandler(handler)
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter(settings.LOG_FORMAT))
    root.addHandler(handler)
    root.setLevel(level)


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", dest="config_file", help="Resolved config JSON to start from")
    parser.add_argument("--out", help="Output directory")
    parser.add_argument("--log-level", choices=["DEBUG", "INFO", "WARNING", "ERROR"])
    parser.add_argument("-v", "--verbose", action="store_true", help="Shorthand for --log-level DEBUG")


def _add_ingestion(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("inputs", nargs="*", help="CSV files, one series each")
    parser.add_argument("--time-column")
    parser.add_argument("--value-column")
    parser.add_argument("--delimiter")
    parser.add_argument("--units")
    parser.add_argument("--trim-start", type=float, metavar="SECONDS")


def _add_wavelet(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--basis", choices=["haar", "morlet"])
    parser.add_argument("--both-bases", action=argparse.BooleanOptionalAction)
    parser.add_argument("--epsilon", type=float)
    parser.add_argument("--normalization", choices=sorted(NORMALIZATION_FLAGS))
    parser.add_argument("--scales", help="log, log:COUNT or full")
    parser.add_argument("--max-k", type=int)
    parser.add_argument("--coi-only", action=argparse.BooleanOptionalAction)
    parser.add_argument("--cutoff", action=argparse.BooleanOptionalAction,
                        help="Restrict to widths with 80%% of coefficients outside the cone of influence")
    parser.add_argument("--workers", type=int)
    parser.add_argument("--svg", action=argparse.BooleanOptionalAction)
    parser.add_argument("--svg-scale", choices=["linear", "log"])


def _add_fourier(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--welch-segments", type=int)
    parser.add_argument("--welch-overlap", type=float)
    parser.add_argument("--window", choices=["hann", "rect"])


def build_parser() -> argparse.ArgumentParser:
    parser = RunArgumentParser(
        prog=settings.PROJECT_NAME,
        description=settings.DESCRIPTION,
        argument_default=argparse.SUPPRESS,
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {settings.VERSION}")
    subparsers = parser.add_subparsers(dest="command", required=True)

    synth = subparsers.add_parser("synth", help="Generate synthetic datasets", argument_default=argparse.SUPPRESS)
    _add_common(synth)
    synth.add_argument("--recipe", help="Recipe JSON")
    synth.add_argument("--preset", help="Named preset recipe")
    synth.add_argument("--seed", type=int)
    synth.add_argument("--n", type=int, help="Preset length")
    synth.add_argument("--dt", type=float, help="Preset sampling interval in seconds")
    synth.add_argument("--time-column")

    cwt = subparsers.add_parser("cwt", help="Wavelet matrix and cone of influence",
                                argument_default=argparse.SUPPRESS)
    spectrum = subparsers.add_parser("spectrum", help="Welch PSD and wavelet spectrum",
                                     argument_default=argparse.SUPPRESS)
    coherence = subparsers.add_parser("coherence", help="Fourier and wavelet coherence of two series",
                                      argument_default=argparse.SUPPRESS)
    correlate = subparsers.add_parser("correlate", help="All-pairs scalewise r2 grid",
                                      argument_default=argparse.SUPPRESS)
    vartransform = subparsers.add_parser("vartransform", help="Wavelet variance transformation",
                                         argument_default=argparse.SUPPRESS)

    for sub in (cwt, spectrum, coherence, correlate, vartransform):
        _add_common(sub)
        _add_ingestion(sub)
        _add_wavelet(sub)
    for sub in (spectrum, coherence):
        _add_fourier(sub)
    for sub in (correlate, vartransform):
        sub.add_argument("--pearson-component", choices=["auto", "real", "magnitude"])
    vartransform.add_argument("--unit-variance", action=argparse.BooleanOptionalAction)
    cwt.add_argument("--widths", type=int, nargs="+", metavar="K",
                     help="Even widths whose columns are exported next to the matching Fourier component")
    cwt.add_argument("--normalise-max", action=argparse.BooleanOptionalAction,
                     help="Also export |W| divided by its maximum")
    return parser


def effective_settings() -> Dict[str, Any]:
    """Settings in force for this run, environment and .env overrides included"""
    return settings.model_dump(mode="json")


def _check_recorded_settings(recorded: Optional[Dict[str, Any]], path: Path) -> None:
    if not recorded:
        return
    current = effective_settings()
    changed = sorted(key for key, value in recorded.items() if current.get(key) != value)
    if changed:
        logger.warning(
            f"Settings differ from those recorded in {path}: {changed}; "
            f"outputs may not reproduce bit-exactly"
        )


def resolve_config(args: argparse.Namespace) -> RunConfig:
    """
    Merge a resolved config file with explicit flags and validate

    Args:
        args: Parsed arguments; only flags given on the command line are present

    Returns:
        Validated RunConfig with absolute paths
    """
    values: Dict[str, Any] = {}
    config_file = getattr(args, "config_file", None)
    if config_file:
        path = Path(config_file)
        if not path.is_file():
            raise InputFileError(f"Config file not found: {path}", {"path": str(path)})
        try:
            values.update(read_json(path))
        except json.JSONDecodeError as e:
            raise ConfigValidationError(f"Config file {path} is not valid JSON: {str(e)}")
        _check_recorded_settings(values.pop("settings", None), path)

    explicit = {
        key: value for key, value in vars(args).items()
        if key not in ("config_file", "log_level", "verbose")
    }
    if not explicit.get("inputs"):
        explicit.pop("inputs", None)
    values.update(explicit)
    if values.get("normalization") in NORMALIZATION_FLAGS:
        values["normalization"] = NORMALIZATION_FLAGS[values["normalization"]]

    for key in PATH_FIELDS:
        if values.get(key) is None:
            continue
        if key == "inputs":
            values[key] = [str(Path(item).expanduser().resolve()) for item in values[key]]
        else:
            values[key] = str(Path(values[key]).expanduser().resolve())

    try:
        return RunConfig.model_validate(values)
    except ValidationError as e:
        raise ConfigValidationError("Invalid run configuration", {"errors": validation_messages(e)})


def run(argv: Optional[List[str]] = None) -> int:
    """
    Parse, run one subcommand and report

    Returns:
        Process exit code
    """
    configure_logging()
    try:
        args = build_parser().parse_args(argv)
        level = "DEBUG" if getattr(args, "verbose", False) else getattr(args, "log_level", None)
        configure_logging(level)
        config = resolve_config(args)
        summary = COMMANDS[config.command](config)
        out = settings.get_output_path(config.out)
        write_json(out / "resolved_config.json", {**config.model_dump(mode="json"), "settings": effective_settings()})
        write_json(out / "summary.json", summary)
    except WavenoiseError as e:
        logger.error(f"{e.code}: {e.message}")
        print(json.dumps(e.to_dict(), default=str), file=sys.stderr)
        return e.exit_code
    except Exception as e:
        logger.exception(f"Unexpected failure: {str(e)}")
        print(json.dumps({"error": "internal_error", "message": str(e), "exit_code": 1}), file=sys.stderr)
        return 1

    logger.info(f"{config.command} finished; outputs in {out}")
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
