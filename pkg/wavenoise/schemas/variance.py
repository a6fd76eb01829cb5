# wavenoise/schemas/variance.py
"""
Pydantic schemas for the wavelet variance transformation
"""
from typing import Any, Dict, List

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from wavenoise.schemas.timeseries import TimeSeries
from wavenoise.schemas.wavelet import ScaleGrid, WaveletSpectrum


class CovarianceVector(BaseModel):
    """C_k = (y - mean(y))^T W_x[:, k] / (N - 1)"""
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    values: np.ndarray
    scale_grid: ScaleGrid

    @property
    def size(self) -> int:
        return int(self.values.size)


class VarianceTransformResult(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    x_prime: TimeSeries
    covariances: CovarianceVector
    contributions: np.ndarray
    variance_spectrum_before: WaveletSpectrum
    variance_spectrum_after: WaveletSpectrum
    peak_k: int
    peak_scale: float = Field(..., description="1/lambda of the largest variance contribution")
    r2_at_peak: float
    predictor: str
    response: str
    unit_variance: bool = False

    def summary(self) -> Dict[str, Any]:
        return {
            "predictor": self.predictor,
            "response": self.response,
            "peak_k": self.peak_k,
            "peak_inv_lambda": self.peak_scale,
            "r2_at_peak": self.r2_at_peak,
        }


class PeakVarianceRow(BaseModel):
    predictor: str
    response: str
    peak_inv_lambda: float
    peak_k: int
    r2_at_peak: float


class PeakVarianceSummary(BaseModel):
    """Ordered-pair table of peak-variance scales

    High variance at a scale does not imply high correlation there; r2_at_peak
    is reported next to the peak for that reason.
    """
    labels: List[str]
    rows: List[PeakVarianceRow] = Field(default_factory=list)

    def get(self, predictor: str, response: str) -> PeakVarianceRow:
        for row in self.rows:
            if row.predictor == predictor and row.response == response:
                return row
        raise KeyError(f"no row for ({predictor}, {response})")
