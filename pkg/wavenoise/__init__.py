# wavenoise/__init__.py
"""Wavelet-based noise analysis for long time series"""
from wavenoise.core.config import settings

__version__ = settings.VERSION
