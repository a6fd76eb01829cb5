# wavenoise/services/variance_service.py
"""
Wavelet variance transformation
The predictor's wavelet matrix is weighted by its per-scale covariance with
the response, then summed back over scales into a reshaped series.
"""
import itertools
import logging
from typing import Optional

import numpy as np

from wavenoise.core.errors import DimensionMismatchError, InsufficientSeriesError
from wavenoise.schemas.correlation import PearsonComponent
from wavenoise.schemas.timeseries import SeriesSet, TimeSeries
from wavenoise.schemas.variance import (
    CovarianceVector,
    PeakVarianceRow,
    PeakVarianceSummary,
    VarianceTransformResult,
)
from wavenoise.schemas.wavelet import ScaleGrid, WaveletBasis, WaveletMatrix
from wavenoise.services.correlation_service import CorrelationService
from wavenoise.services.timeseries_service import TimeSeriesService, centered
from wavenoise.services.wavelet_service import WaveletService

logger = logging.getLogger(__name__)


class VarianceService:
    """Service class for the variance transformation"""

    def __init__(
        self,
        wavelet_service: Optional[WaveletService] = None,
        correlation_service: Optional[CorrelationService] = None,
    ):
        self.wavelet_service = wavelet_service or WaveletService()
        self.correlation_service = correlation_service or CorrelationService(self.wavelet_service)

    def scale_cutoff(self, n: int, grid: ScaleGrid, basis: WaveletBasis) -> ScaleGrid:
        """Widths with at least 80% of coefficients outside the cone of influence"""
        return self.wavelet_service.scale_cutoff(n, grid, basis)

    @staticmethod
    def covariance_vector(y: TimeSeries, wx: WaveletMatrix) -> CovarianceVector:
        """
        C^T = (y - mean(y))^T W_x / (N - 1), over all translations

        Args:
            y: Response series
            wx: Wavelet matrix of the predictor

        Returns:
            CovarianceVector aligned to wx's grid
        """
        if y.n != wx.n:
            raise DimensionMismatchError(
                f"response '{y.label}' has {y.n} samples, wavelet matrix has {wx.n} rows"
            )
        values = centered(y.values) @ wx.coefficients / (y.n - 1)
        return CovarianceVector(values=values, scale_grid=wx.scale_grid)

    @staticmethod
    def recombine(wx: WaveletMatrix, covariances: CovarianceVector, sigma_x: float):
        """
        Weighted sum over scales and the per-scale variance it carries

        Returns:
            (x_prime, contributions) where x_prime[m] = sigma_x * Re(sum_k W[m, k] C_k)
            and contributions[k] = sigma_x^2 * Var(Re(W[:, k] C_k))
        """
        terms = (wx.coefficients * covariances.values[None, :]).real
        return sigma_x * terms.sum(axis=1), sigma_x ** 2 * terms.var(axis=0, ddof=1)

    def variance_transform(
        self,
        x: TimeSeries,
        y: TimeSeries,
        basis: WaveletBasis,
        grid: ScaleGrid,
        apply_cutoff: bool = True,
        unit_variance: bool = False,
        component: PearsonComponent = PearsonComponent.AUTO,
    ) -> VarianceTransformResult:
        """
        Reshape predictor x toward response y: x' = Re(sigma_x * W_x C)

        Args:
            x: Predictor series
            y: Response series aligned with x
            basis: Wavelet basis
            grid: Scale grid
            apply_cutoff: Restrict the grid to its trustworthy widths first
            unit_variance: Scale x' to unit sample variance
            component: Pearson component used for r2 at the peak scale

        Returns:
            VarianceTransformResult
        """
        TimeSeriesService.require_aligned(x, y)
        if apply_cutoff:
            grid = self.scale_cutoff(x.n, grid, basis)

        wx = self.wavelet_service.cwt(x, basis, grid)
        covariances = self.covariance_vector(y, wx)
        sigma_x = TimeSeriesService.std(x)

        x_prime_values, contributions = self.recombine(wx, covariances, sigma_x)
        peak = int(np.argmax(contributions))
        peak_k = int(grid.k_values[peak])

        if unit_variance:
            spread = TimeSeriesService.std(x.with_values(x_prime_values))
            if spread > 0:
                x_prime_values = x_prime_values / spread
        x_prime = x.with_values(x_prime_values, label=f"{x.label}_prime")

        wy = self.wavelet_service.cwt(y, basis, grid)
        correlation = self.correlation_service.scalewise_pearson(wx, wy, component)
        try:
            r2_at_peak = correlation.at_k(peak_k).r2
        except KeyError:
            r2_at_peak = 0.0

        before = self.wavelet_service.wavelet_spectrum(wx)
        after = self.wavelet_service.wavelet_spectrum(self.wavelet_service.cwt(x_prime, basis, grid))

        logger.info(
            f"Variance transform {x.label} -> {y.label}: peak k={peak_k} "
            f"(1/lambda={grid.inverse_widths[peak]:.6g} 1/s), r2={r2_at_peak:.3f}"
        )
        return VarianceTransformResult(
            x_prime=x_prime,
            covariances=covariances,
            contributions=contributions,
            variance_spectrum_before=before,
            variance_spectrum_after=after,
            peak_k=peak_k,
            peak_scale=float(grid.inverse_widths[peak]),
            r2_at_peak=r2_at_peak,
            predictor=x.label,
            response=y.label,
            unit_variance=unit_variance,
        )

    def peak_variance_summary(
        self,
        series_set: SeriesSet,
        basis: WaveletBasis,
        grid: ScaleGrid,
        apply_cutoff: bool = True,
        component: PearsonComponent = PearsonComponent.AUTO,
    ) -> PeakVarianceSummary:
        """
        Peak-variance scale and r2 there for every ordered (predictor, response) pair

        Args:
            series_set: Aligned series
            basis: Wavelet basis
            grid: Scale grid

        Returns:
            PeakVarianceSummary
        """
        if len(series_set) < 2:
            raise InsufficientSeriesError(
                f"a peak-variance summary needs at least 2 series, got {len(series_set)}"
            )
        if apply_cutoff:
            grid = self.scale_cutoff(series_set.n, grid, basis)

        rows = []
        for i, j in itertools.permutations(range(len(series_set)), 2):
            result = self.variance_transform(
                series_set[i], series_set[j], basis, grid, apply_cutoff=False, component=component
            )
            rows.append(PeakVarianceRow(
                predictor=result.predictor,
                response=result.response,
                peak_inv_lambda=result.peak_scale,
                peak_k=result.peak_k,
                r2_at_peak=result.r2_at_peak,
            ))
        return PeakVarianceSummary(labels=series_set.labels, rows=rows)
