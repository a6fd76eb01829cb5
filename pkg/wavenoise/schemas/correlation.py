# wavenoise/schemas/correlation.py
"""
Pydantic schemas for scale-resolved correlation results
"""
import enum
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from wavenoise.schemas.wavelet import BasisKind, ScaleGrid


class PearsonComponent(str, enum.Enum):
    """Which real quantity of a coefficient enters the Pearson correlation"""
    AUTO = "auto"           # real part, for either basis
    REAL = "real"
    MAGNITUDE = "magnitude"


class CoherenceMap(BaseModel):
    """Squared wavelet coherence over translations x scales"""
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    values: np.ndarray
    scale_grid: ScaleGrid
    coi_mask: np.ndarray
    time_smoothing_factor: float = 1.0
    scale_boxcar_width: float = 0.6
    labels: Tuple[str, str] = ("x", "y")

    def interior_values(self) -> np.ndarray:
        return self.values[self.coi_mask]

    def metadata(self) -> Dict[str, Any]:
        return {
            "quantity": "coherence squared",
            "labels": list(self.labels),
            "dt": self.scale_grid.dt,
            "k_values": [int(k) for k in self.scale_grid.k_values],
            "time_smoothing": f"gaussian, tau = {self.time_smoothing_factor} * lambda",
            "scale_boxcar_width": self.scale_boxcar_width,
        }


# ============================================================================
# PEARSON
# ============================================================================

class ScaleCorrelationEntry(BaseModel):
    inv_lambda: float
    k: int
    r: float = Field(..., ge=-1.0, le=1.0)
    r2: float = Field(..., ge=0.0, le=1.0)
    n_used: int = Field(..., ge=3)
    coi_fraction: float = Field(..., ge=0.0, le=1.0)


class ScaleCorrelation(BaseModel):
    """Per-scale Pearson r between two coefficient matrices"""
    entries: List[ScaleCorrelationEntry] = Field(default_factory=list)
    basis: BasisKind = BasisKind.HAAR
    component: PearsonComponent = PearsonComponent.AUTO
    coi_only: bool = True
    omitted_k: List[int] = Field(default_factory=list)

    @property
    def r2_values(self) -> np.ndarray:
        return np.array([entry.r2 for entry in self.entries], dtype=np.float64)

    @property
    def k_values(self) -> np.ndarray:
        return np.array([entry.k for entry in self.entries], dtype=np.int64)

    def mean_r2(self) -> float:
        if not self.entries:
            return 0.0
        return float(np.mean(self.r2_values))

    def at_k(self, k: int) -> ScaleCorrelationEntry:
        for entry in self.entries:
            if entry.k == k:
                return entry
        raise KeyError(f"no correlation entry for k={k}")

    def best(self) -> ScaleCorrelationEntry:
        if not self.entries:
            raise KeyError("no correlation entries")
        return max(self.entries, key=lambda entry: entry.r2)


class CorrelationPair(BaseModel):
    var_a: str
    var_b: str
    correlation: ScaleCorrelation


class CorrelationGrid(BaseModel):
    """Off-diagonal pairwise scalewise correlations"""
    labels: List[str]
    pairs: List[CorrelationPair] = Field(default_factory=list)

    def get(self, var_a: str, var_b: str, basis: Optional[BasisKind] = None) -> ScaleCorrelation:
        """Look a pair up in either order"""
        for pair in self.pairs:
            if {pair.var_a, pair.var_b} == {var_a, var_b} and (
                basis is None or pair.correlation.basis == basis
            ):
                return pair.correlation
        raise KeyError(f"no pair ({var_a}, {var_b})")

    def rows(self) -> List[Dict[str, Any]]:
        """Long-form table: one row per pair, basis and scale"""
        table = []
        for pair in self.pairs:
            for entry in pair.correlation.entries:
                table.append({
                    "var_a": pair.var_a,
                    "var_b": pair.var_b,
                    "basis": pair.correlation.basis.value,
                    "inv_lambda": entry.inv_lambda,
                    "r": entry.r,
                    "r2": entry.r2,
                    "n_used": entry.n_used,
                    "coi_fraction": entry.coi_fraction,
                })
        return table
