# wavenoise/schemas/wavelet.py
"""
Pydantic schemas for wavelet bases, scale grids, coefficient matrices and spectra
"""
import enum
from typing import Any, Dict, List, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from wavenoise.core.config import settings
from wavenoise.core.errors import InvalidScaleError, InvalidWaveletParameterError
from wavenoise.schemas.timeseries import as_frozen_array


class BasisKind(str, enum.Enum):
    """Mother wavelets"""
    HAAR = "haar"
    MORLET = "morlet"


class Normalization(str, enum.Enum):
    """Discretization conventions"""
    LITERAL = "literal"
    UNIT_NORM = "unit_norm"


class GridMode(str, enum.Enum):
    """How the even widths k are chosen"""
    FULL = "full"
    LOG_SPACED = "log_spaced"


# ============================================================================
# BASIS AND GRID
# ============================================================================

class WaveletBasis(BaseModel):
    """Mother wavelet plus its discretization convention"""
    model_config = ConfigDict(frozen=True)

    kind: BasisKind = BasisKind.HAAR
    epsilon: float = Field(default=settings.DEFAULT_EPSILON, description="Morlet Gaussian-window parameter")
    normalization: Normalization = Normalization.UNIT_NORM

    @model_validator(mode="after")
    def validate_epsilon(self):
        if self.kind == BasisKind.MORLET and self.epsilon < settings.MIN_EPSILON:
            raise InvalidWaveletParameterError(
                f"Morlet epsilon must be at least {settings.MIN_EPSILON}, got {self.epsilon}"
            )
        return self

    @property
    def is_complex(self) -> bool:
        return self.kind == BasisKind.MORLET

    def describe(self) -> Dict[str, Any]:
        data = {"basis": self.kind.value, "normalization": self.normalization.value}
        if self.kind == BasisKind.MORLET:
            data["epsilon"] = self.epsilon
        return data


class ScaleGrid(BaseModel):
    """Ordered even integer widths k, lambda = k * dt"""
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    k_values: np.ndarray
    dt: float = Field(..., gt=0)
    mode: GridMode = GridMode.LOG_SPACED

    @field_validator("k_values", mode="before")
    @classmethod
    def validate_k_values(cls, v):
        array = np.asarray(v)
        if array.ndim != 1 or array.size == 0:
            raise ValueError("k_values must be a non-empty vector")
        if not np.all(np.equal(np.mod(array, 1), 0)):
            raise ValueError("k_values must be integers")
        array = array.astype(np.int64)
        if np.any(array < 2) or np.any(array % 2 != 0):
            raise ValueError("every k must be an even integer >= 2")
        if np.any(np.diff(array) <= 0):
            raise ValueError("k_values must be strictly increasing")
        return as_frozen_array(array, dtype=np.int64)

    @staticmethod
    def largest_k(n: int, max_k: Optional[int] = None) -> int:
        """Largest even k <= N - 1, optionally capped"""
        k_max = 2 * ((n - 1) // 2)
        if max_k is not None:
            k_max = min(k_max, max_k - max_k % 2)
        if k_max < 2:
            raise InvalidScaleError(f"no even width k >= 2 fits a series of {n} samples")
        return k_max

    @classmethod
    def log_spaced(cls, n: int, dt: float, count: int = 48, max_k: Optional[int] = None) -> "ScaleGrid":
        """`count` geometrically spaced widths from 2 to the largest k, rounded to even"""
        k_max = cls.largest_k(n, max_k)
        raw = np.geomspace(2.0, float(k_max), max(int(count), 1))
        k_values = np.unique(np.clip(2 * np.round(raw / 2.0), 2, k_max).astype(np.int64))
        return cls(k_values=k_values, dt=dt, mode=GridMode.LOG_SPACED)

    @classmethod
    def full(cls, n: int, dt: float, max_k: Optional[int] = None) -> "ScaleGrid":
        """Every even width 2, 4, ..., K"""
        k_max = cls.largest_k(n, max_k)
        return cls(k_values=np.arange(2, k_max + 1, 2, dtype=np.int64), dt=dt, mode=GridMode.FULL)

    @property
    def size(self) -> int:
        return int(self.k_values.size)

    @property
    def widths(self) -> np.ndarray:
        """lambda_j in seconds"""
        return self.k_values * self.dt

    @property
    def inverse_widths(self) -> np.ndarray:
        """1 / lambda_j in 1/seconds"""
        return 1.0 / self.widths

    @property
    def k_max(self) -> int:
        return int(self.k_values[-1])

    def subset(self, keep: np.ndarray) -> "ScaleGrid":
        return ScaleGrid(k_values=self.k_values[keep], dt=self.dt, mode=self.mode)

    def same_as(self, other: "ScaleGrid") -> bool:
        return self.dt == other.dt and np.array_equal(self.k_values, other.k_values)


# ============================================================================
# TRANSFORM OUTPUTS
# ============================================================================

class WaveletMatrix(BaseModel):
    """Coefficients W(m, k): rows are translations m, columns are widths k"""
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    coefficients: np.ndarray
    scale_grid: ScaleGrid
    basis: WaveletBasis
    coi_mask: np.ndarray
    coi_radii: np.ndarray
    source_label: str = "x"
    units: str = ""

    @model_validator(mode="after")
    def validate_shapes(self):
        n_scales = self.scale_grid.size
        if self.coefficients.ndim != 2 or self.coefficients.shape[1] != n_scales:
            raise ValueError("coefficients must be N x |k_values|")
        if self.coi_mask.shape != self.coefficients.shape:
            raise ValueError("coi_mask must match the coefficient matrix")
        return self

    @property
    def n(self) -> int:
        return int(self.coefficients.shape[0])

    @property
    def dt(self) -> float:
        return self.scale_grid.dt

    def column(self, index: int) -> np.ndarray:
        return self.coefficients[:, index]

    def metadata(self) -> Dict[str, Any]:
        data = self.basis.describe()
        data.update({
            "source_label": self.source_label,
            "units": self.units,
            "dt": self.dt,
            "n": self.n,
            "grid_mode": self.scale_grid.mode.value,
            "k_values": [int(k) for k in self.scale_grid.k_values],
            "coi_radii": [int(r) for r in self.coi_radii],
        })
        return data


class WaveletSpectrum(BaseModel):
    """Per-scale variance of W(., k); sigma4 = sigma2 ** 2"""
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    k_values: np.ndarray
    inverse_widths: np.ndarray
    sigma2: np.ndarray
    n_used: np.ndarray
    basis: WaveletBasis
    coi_only: bool = True
    dropped_k: List[int] = Field(default_factory=list)

    @property
    def sigma4(self) -> np.ndarray:
        return self.sigma2 ** 2

    @property
    def widths(self) -> np.ndarray:
        return 1.0 / self.inverse_widths

    def normalised(self) -> np.ndarray:
        """Variance divided by the sum of variances across scales"""
        total = float(np.sum(self.sigma2))
        if total == 0.0:
            return np.zeros_like(self.sigma2)
        return self.sigma2 / total

    def loglog_slope(self, k_min: int = 0, k_max: int = 0) -> float:
        """Least-squares exponent of sigma2 against lambda over a k band"""
        keep = self.sigma2 > 0
        if k_min:
            keep &= self.k_values >= k_min
        if k_max:
            keep &= self.k_values <= k_max
        if np.count_nonzero(keep) < 2:
            raise ValueError("need at least two positive scales to fit a slope")
        slope, _ = np.polyfit(np.log(self.widths[keep]), np.log(self.sigma2[keep]), 1)
        return float(slope)
