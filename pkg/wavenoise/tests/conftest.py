# wavenoise/tests/conftest.py
"""
Shared fixtures
"""
from pathlib import Path
from typing import Callable

import numpy as np
import pytest

from wavenoise.schemas.timeseries import TimeSeries
from wavenoise.schemas.wavelet import ScaleGrid


@pytest.fixture
def white() -> Callable[..., TimeSeries]:
    """Factory for white-noise series"""
    def make(n: int = 1024, seed: int = 0, dt: float = 1.0, sigma: float = 1.0, label: str = "x") -> TimeSeries:
        values = sigma * np.random.default_rng(seed).standard_normal(n)
        return TimeSeries(label=label, dt=dt, values=values)
    return make


@pytest.fixture
def write_series_csv(tmp_path) -> Callable[..., Path]:
    """Factory writing a time,value CSV under tmp_path"""
    def write(name: str, times, values, header: str = "time,value") -> Path:
        path = tmp_path / name
        lines = [header] + [f"{float(t)!r},{float(v)!r}" for t, v in zip(times, values)]
        path.write_text("\n".join(lines) + "\n", encoding="utf-8")
        return path
    return write


@pytest.fixture
def small_grid() -> Callable[..., ScaleGrid]:
    def make(k_values, dt: float = 1.0) -> ScaleGrid:
        return ScaleGrid(k_values=list(k_values), dt=dt)
    return make
