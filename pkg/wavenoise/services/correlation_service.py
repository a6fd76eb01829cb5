# wavenoise/services/correlation_service.py
"""
Scale-resolved correlation: smoothed Morlet wavelet coherence, per-scale
Pearson r and the all-pairs correlation grid
"""
import itertools
import logging
import math
from typing import List, Optional, Sequence

import numpy as np
from scipy import signal

from wavenoise.core.config import settings
from wavenoise.core.errors import DimensionMismatchError, InsufficientSeriesError, UnsupportedBasisError
from wavenoise.schemas.correlation import (
    CoherenceMap,
    CorrelationGrid,
    CorrelationPair,
    PearsonComponent,
    ScaleCorrelation,
    ScaleCorrelationEntry,
)
from wavenoise.schemas.timeseries import SeriesSet, TimeSeries
from wavenoise.schemas.wavelet import BasisKind, ScaleGrid, WaveletBasis, WaveletMatrix
from wavenoise.services.timeseries_service import TimeSeriesService
from wavenoise.services.wavelet_service import WaveletService, coi_fraction

logger = logging.getLogger(__name__)


def scale_averaging_matrix(k_values: np.ndarray, width: float) -> np.ndarray:
    """Row j averages the scales inside [k_j / (1 + width/2), k_j * (1 + width/2)]"""
    k = np.asarray(k_values, dtype=np.float64)
    factor = 1.0 + width / 2.0
    inside = (k[None, :] * factor >= k[:, None]) & (k[None, :] <= k[:, None] * factor)
    weights = inside.astype(np.float64)
    return weights / weights.sum(axis=1, keepdims=True)


class CorrelationService:
    """Service class for coherence and correlation between series"""

    def __init__(self, wavelet_service: Optional[WaveletService] = None):
        self.wavelet_service = wavelet_service or WaveletService()

    # ========================================================================
    # SMOOTHING AND COHERENCE
    # ========================================================================

    def smooth_map(
        self,
        values: np.ndarray,
        grid: ScaleGrid,
        time_factor: Optional[float] = None,
        scale_width: Optional[float] = None,
    ) -> np.ndarray:
        """
        Smooth a translation x scale map in time, then across scales

        Args:
            values: N x |k_values| array (real or complex)
            grid: Scale grid of the columns
            time_factor: Gaussian width tau = time_factor * lambda
            scale_width: Relative boxcar width across scales

        Returns:
            Smoothed array of the same shape and dtype kind
        """
        time_factor = settings.TIME_SMOOTHING_FACTOR if time_factor is None else time_factor
        scale_width = settings.SCALE_BOXCAR_WIDTH if scale_width is None else scale_width
        values = np.asarray(values)
        if values.ndim != 2 or values.shape[1] != grid.size:
            raise DimensionMismatchError(
                f"map of shape {values.shape} does not match a grid of {grid.size} scales"
            )

        n = values.shape[0]
        smoothed = np.empty_like(values, dtype=np.result_type(values.dtype, np.float64))
        support = np.ones(n, dtype=np.float64)
        for j, k in enumerate(grid.k_values):
            sigma = time_factor * float(k)
            if sigma <= 0:
                smoothed[:, j] = values[:, j]
                continue
            half = min(int(math.ceil(settings.GAUSSIAN_TRUNCATION * sigma)), n - 1)
            d = np.arange(-half, half + 1, dtype=np.float64)
            kernel = np.exp(-0.5 * (d / sigma) ** 2)
            total = signal.convolve(values[:, j], kernel, mode="same", method="auto")
            # renormalize over the part of the kernel that overlaps the record
            weight = signal.convolve(support, kernel, mode="same", method="auto")
            smoothed[:, j] = total / weight

        averaging = scale_averaging_matrix(grid.k_values, scale_width)
        return smoothed @ averaging.T

    def wavelet_coherence(
        self,
        x: TimeSeries,
        y: TimeSeries,
        grid: ScaleGrid,
        basis: Optional[WaveletBasis] = None,
        time_factor: Optional[float] = None,
        scale_width: Optional[float] = None,
    ) -> CoherenceMap:
        """
        Squared wavelet coherence |s(Wx Wy*)|^2 / (s(|Wx|^2) s(|Wy|^2))

        Args:
            x, y: Aligned series
            grid: Scale grid
            basis: Morlet basis (Haar has no natural smoothing and is rejected)

        Returns:
            CoherenceMap with values in [0, 1]
        """
        basis = basis or WaveletBasis(kind=BasisKind.MORLET, epsilon=settings.DEFAULT_EPSILON)
        if basis.kind != BasisKind.MORLET:
            raise UnsupportedBasisError(
                "wavelet coherence is defined for the Morlet basis only",
                {"basis": basis.kind.value},
            )
        TimeSeriesService.require_aligned(x, y)
        time_factor = settings.TIME_SMOOTHING_FACTOR if time_factor is None else time_factor
        scale_width = settings.SCALE_BOXCAR_WIDTH if scale_width is None else scale_width

        # mean-removed inputs keep the map invariant under x -> a x + b
        wx = self.wavelet_service.cwt(x, basis, grid, remove_mean=True)
        wy = self.wavelet_service.cwt(y, basis, grid, remove_mean=True)
        a, b = wx.coefficients.real, wx.coefficients.imag
        c, d = wy.coefficients.real, wy.coefficients.imag

        # Wx * conj(Wy), real and imaginary parts kept separate so that
        # swapping x and y flips the sign of the imaginary part exactly
        cross_re = self.smooth_map(a * c + b * d, grid, time_factor, scale_width)
        cross_im = self.smooth_map(b * c - a * d, grid, time_factor, scale_width)
        power_x = self.smooth_map(a * a + b * b, grid, time_factor, scale_width)
        power_y = self.smooth_map(c * c + d * d, grid, time_factor, scale_width)

        denominator = power_x * power_y
        values = np.zeros_like(denominator)
        defined = denominator > 0
        values[defined] = (cross_re[defined] ** 2 + cross_im[defined] ** 2) / denominator[defined]
        values = np.clip(values, 0.0, 1.0)

        return CoherenceMap(
            values=values,
            scale_grid=grid,
            coi_mask=wx.coi_mask & wy.coi_mask,
            time_smoothing_factor=time_factor,
            scale_boxcar_width=scale_width,
            labels=(x.label, y.label),
        )

    # ========================================================================
    # PEARSON
    # ========================================================================

    @staticmethod
    def _component(values: np.ndarray, component: PearsonComponent) -> np.ndarray:
        if component == PearsonComponent.MAGNITUDE:
            return np.abs(values)
        return values.real

    def scalewise_pearson(
        self,
        wx: WaveletMatrix,
        wy: WaveletMatrix,
        component: PearsonComponent = PearsonComponent.AUTO,
        coi_only: bool = True,
    ) -> ScaleCorrelation:
        """
        Pearson r between matching columns of two coefficient matrices

        Args:
            wx, wy: Transforms on the same grid and basis
            component: Real part or magnitude; auto means the real part for either basis
            coi_only: Use only translations inside both cones of influence

        Returns:
            ScaleCorrelation; scales with fewer than MIN_PAIR_COUNT pairs or a
            constant column are omitted
        """
        if wx.n != wy.n or not wx.scale_grid.same_as(wy.scale_grid):
            raise DimensionMismatchError("scalewise_pearson needs matrices on the same grid and length")
        if wx.basis.kind != wy.basis.kind:
            raise DimensionMismatchError(
                f"scalewise_pearson needs one basis, got {wx.basis.kind.value} and {wy.basis.kind.value}"
            )
        component = PearsonComponent(component)
        resolved = PearsonComponent.REAL if component == PearsonComponent.AUTO else component

        both = wx.coi_mask & wy.coi_mask
        entries: List[ScaleCorrelationEntry] = []
        omitted: List[int] = []
        inverse_widths = wx.scale_grid.inverse_widths
        for j, k in enumerate(wx.scale_grid.k_values):
            rows = both[:, j] if coi_only else slice(None)
            a = self._component(wx.coefficients[rows, j], resolved)
            b = self._component(wy.coefficients[rows, j], resolved)
            if a.size < settings.MIN_PAIR_COUNT:
                omitted.append(int(k))
                continue
            da = a - a.mean()
            db = b - b.mean()
            sxx = float(np.dot(da, da))
            syy = float(np.dot(db, db))
            if sxx == 0.0 or syy == 0.0:
                logger.warning(
                    f"Pearson r undefined at k={int(k)} for '{wx.source_label}'/'{wy.source_label}': "
                    f"zero-variance column"
                )
                omitted.append(int(k))
                continue
            r = float(np.clip(np.dot(da, db) / math.sqrt(sxx * syy), -1.0, 1.0))
            entries.append(ScaleCorrelationEntry(
                inv_lambda=float(inverse_widths[j]),
                k=int(k),
                r=r,
                r2=r * r,
                n_used=int(a.size),
                coi_fraction=coi_fraction(wx.n, int(k), wx.basis),
            ))

        if omitted:
            logger.debug(f"Omitted {len(omitted)} scales from the Pearson table: k={omitted}")
        return ScaleCorrelation(
            entries=entries,
            basis=wx.basis.kind,
            component=component,
            coi_only=coi_only,
            omitted_k=omitted,
        )

    def correlation_grid(
        self,
        series_set: SeriesSet,
        bases: Sequence[WaveletBasis],
        grid: ScaleGrid,
        apply_cutoff: bool = False,
        component: PearsonComponent = PearsonComponent.AUTO,
        coi_only: bool = True,
    ) -> CorrelationGrid:
        """
        Scalewise Pearson r for every unordered pair of series, per basis

        Args:
            series_set: Aligned series
            bases: One or more bases to evaluate
            grid: Scale grid shared by all series
            apply_cutoff: Restrict each basis to its trustworthy widths first

        Returns:
            CorrelationGrid without diagonal entries
        """
        if len(series_set) < 2:
            raise InsufficientSeriesError(
                f"a correlation grid needs at least 2 series, got {len(series_set)}"
            )
        pairs: List[CorrelationPair] = []
        for basis in bases:
            basis_grid = self.wavelet_service.scale_cutoff(series_set.n, grid, basis) if apply_cutoff else grid
            matrices = [
                self.wavelet_service.cwt(series, basis, basis_grid, remove_mean=True)
                for series in series_set.entries
            ]
            for i, j in itertools.combinations(range(len(series_set)), 2):
                pairs.append(CorrelationPair(
                    var_a=series_set[i].label,
                    var_b=series_set[j].label,
                    correlation=self.scalewise_pearson(matrices[i], matrices[j], component, coi_only),
                ))
            logger.info(
                f"Correlated {len(series_set) * (len(series_set) - 1) // 2} pairs over "
                f"{basis_grid.size} {basis.kind.value} scales"
            )
        return CorrelationGrid(labels=series_set.labels, pairs=pairs)
