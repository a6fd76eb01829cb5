# wavenoise/schemas/spectrum.py
"""
Pydantic schemas for Fourier-side estimates
"""
import enum
from typing import Any, Dict

import numpy as np
from pydantic import BaseModel, ConfigDict, Field


class Estimator(str, enum.Enum):
    PERIODOGRAM = "periodogram"
    WELCH = "welch"


class WindowKind(str, enum.Enum):
    HANN = "hann"
    RECT = "rect"

    @property
    def scipy_name(self) -> str:
        return "boxcar" if self is WindowKind.RECT else "hann"


class Spectrum(BaseModel):
    """One-sided density on (0, 1/(2 dt)]; complex for cross-spectra"""
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    frequencies: np.ndarray
    values: np.ndarray
    estimator: Estimator
    segment_length: int
    overlap_fraction: float = 0.0
    window: WindowKind = WindowKind.RECT
    n_segments: int = 1
    units: str = ""

    @property
    def is_complex(self) -> bool:
        return np.iscomplexobj(self.values)

    @property
    def df(self) -> float:
        """Bin spacing 1 / (L * dt)"""
        if self.frequencies.size > 1:
            return float(self.frequencies[1] - self.frequencies[0])
        return float(self.frequencies[0])

    def integrated_power(self) -> float:
        """Sum of values * df (Parseval check)"""
        return float(np.sum(np.real(self.values)) * self.df)

    def metadata(self) -> Dict[str, Any]:
        return {
            "estimator": self.estimator.value,
            "segment_length": self.segment_length,
            "overlap_fraction": self.overlap_fraction,
            "window": self.window.value,
            "n_segments": self.n_segments,
            "df_hz": self.df,
            "units": self.units,
        }


class CoherenceSpectrum(BaseModel):
    """|S_xy|^2 / (S_xx S_yy) per bin; NaN where a bin has no power"""
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    frequencies: np.ndarray
    values: np.ndarray
    n_segments: int = Field(..., ge=2)
    segment_length: int

    @property
    def defined(self) -> np.ndarray:
        return np.isfinite(self.values)
