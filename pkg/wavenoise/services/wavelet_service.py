# wavenoise/services/wavelet_service.py
"""
Discretized mother wavelets, the continuous wavelet transform, the cone of
influence and per-scale wavelet spectra.

Kernels are stored as (offsets, values) with offset d = n - m, so that
W(m, k) = sum_d x[m + d] * conj(psi_k[d]).
"""
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from functools import lru_cache
from typing import Optional, Tuple

import numpy as np
from scipy import signal

from wavenoise.core.config import settings
from wavenoise.core.errors import (
    DimensionMismatchError,
    EmptyMatrixError,
    InvalidScaleError,
    InvalidWaveletParameterError,
    ScaleCutoffError,
)
from wavenoise.schemas.timeseries import TimeSeries, as_frozen_array
from wavenoise.schemas.wavelet import (
    BasisKind,
    GridMode,
    Normalization,
    ScaleGrid,
    WaveletBasis,
    WaveletMatrix,
    WaveletSpectrum,
)
from wavenoise.services.timeseries_service import centered

logger = logging.getLogger(__name__)

Kernel = Tuple[np.ndarray, np.ndarray]


def _check_width(k: int) -> int:
    if int(k) != k or k < 2 or int(k) % 2 != 0:
        raise InvalidScaleError(f"wavelet width k must be an even integer >= 2, got {k}", {"k": k})
    return int(k)


def _check_epsilon(epsilon: float) -> float:
    if not epsilon >= settings.MIN_EPSILON:
        raise InvalidWaveletParameterError(
            f"Morlet epsilon must be at least {settings.MIN_EPSILON}, got {epsilon}",
            {"epsilon": epsilon},
        )
    return float(epsilon)


# ============================================================================
# KERNELS
# ============================================================================

@lru_cache(maxsize=512)
def haar_kernel(k: int, normalization: Normalization = Normalization.UNIT_NORM) -> Kernel:
    """
    Haar wavelet of width k

    unit_norm: +1/sqrt(k) on d in [-k/2, 0), -1/sqrt(k) on d in [0, k/2)
    literal: +1/(2 sqrt(k)) on d in [-k/2, 0], -1/(2 sqrt(k)) on d in (0, k/2]
    """
    k = _check_width(k)
    half = k // 2
    if Normalization(normalization) == Normalization.UNIT_NORM:
        offsets = np.arange(-half, half, dtype=np.int64)
        values = np.where(offsets < 0, 1.0, -1.0) / math.sqrt(k)
    else:
        offsets = np.arange(-half, half + 1, dtype=np.int64)
        values = np.where(offsets <= 0, 1.0, -1.0) / (2.0 * math.sqrt(k))
    return as_frozen_array(offsets, np.int64), as_frozen_array(values, np.float64)


@lru_cache(maxsize=512)
def morlet_kernel(
    k: int,
    epsilon: float = 5.0,
    normalization: Normalization = Normalization.UNIT_NORM,
) -> Kernel:
    """
    Morlet wavelet of width k on |d| <= MORLET_TRUNCATION * k

    psi[d] = k^-1/2 (exp(-i eps u) - c) exp(-u^2 / 2), u = d / k.
    literal uses c = exp(-eps^2 / 2). unit_norm recomputes c so the
    truncated vector sums to zero, then scales it to unit l2 norm.
    """
    k = _check_width(k)
    epsilon = _check_epsilon(epsilon)
    half = settings.MORLET_TRUNCATION * k
    offsets = np.arange(-half, half + 1, dtype=np.int64)
    u = offsets / k
    envelope = np.exp(-0.5 * u * u)
    carrier = np.exp(-1j * epsilon * u)

    if Normalization(normalization) == Normalization.UNIT_NORM:
        correction = np.sum(carrier * envelope) / np.sum(envelope)
        values = (carrier - correction) * envelope
        values = values / np.sqrt(np.sum(np.abs(values) ** 2))
    else:
        values = (carrier - math.exp(-0.5 * epsilon * epsilon)) * envelope / math.sqrt(k)
    return as_frozen_array(offsets, np.int64), as_frozen_array(values, np.complex128)


def wavelet_kernel(basis: WaveletBasis, k: int) -> Kernel:
    if basis.kind == BasisKind.HAAR:
        return haar_kernel(int(k), basis.normalization)
    return morlet_kernel(int(k), float(basis.epsilon), basis.normalization)


def _lookup(kernel: Kernel, d: int):
    offsets, values = kernel
    index = d - int(offsets[0])
    if 0 <= index < offsets.size:
        return values[index]
    return values.dtype.type(0)


def haar_value(n: int, m: int, k: int, normalization: Normalization = Normalization.UNIT_NORM) -> float:
    """psi_n(m, k) for the Haar wavelet"""
    return float(_lookup(haar_kernel(_check_width(k), Normalization(normalization)), n - m))


def morlet_value(
    n: int,
    m: int,
    k: int,
    epsilon: float = 5.0,
    normalization: Normalization = Normalization.UNIT_NORM,
) -> complex:
    """psi_n(m, k) for the Morlet wavelet"""
    kernel = morlet_kernel(_check_width(k), _check_epsilon(epsilon), Normalization(normalization))
    return complex(_lookup(kernel, n - m))


# ============================================================================
# CONE OF INFLUENCE
# ============================================================================

def coi_radius(k: int, basis: WaveletBasis) -> int:
    """Half-width in samples of the wavelet's effective support"""
    k = _check_width(k)
    if basis.kind == BasisKind.HAAR:
        return k // 2
    return math.ceil(math.sqrt(2.0) * k)


def coi_fraction(n: int, k: int, basis: WaveletBasis) -> float:
    """Share of the N translations whose wavelet support lies inside the record"""
    return max(0, n - 2 * coi_radius(k, basis)) / n


def coi_mask(n: int, grid: ScaleGrid, basis: WaveletBasis) -> Tuple[np.ndarray, np.ndarray]:
    radii = np.array([coi_radius(int(k), basis) for k in grid.k_values], dtype=np.int64)
    m = np.arange(n, dtype=np.int64)[:, None]
    mask = (m >= radii[None, :]) & (m <= n - 1 - radii[None, :])
    return mask, radii


class WaveletService:
    """Service class for wavelet transforms"""

    def __init__(self, workers: Optional[int] = None):
        self.workers = workers or settings.CWT_WORKERS

    def build_grid(
        self,
        n: int,
        dt: float,
        mode: GridMode = GridMode.LOG_SPACED,
        count: Optional[int] = None,
        max_k: Optional[int] = None,
    ) -> ScaleGrid:
        """
        Scale grid for a series of n samples

        Args:
            n: Series length
            dt: Sampling interval in seconds
            mode: log_spaced or full
            count: Number of log-spaced widths before de-duplication
            max_k: Optional cap on k (must be even)

        Returns:
            ScaleGrid
        """
        if max_k is not None and (max_k < 2 or max_k % 2 != 0):
            raise InvalidScaleError(f"max_k must be an even integer >= 2, got {max_k}")
        if mode == GridMode.FULL:
            if n > settings.FULL_GRID_WARN_N:
                logger.warning(
                    f"full grid at N={n} computes {ScaleGrid.largest_k(n, max_k) // 2} scales; "
                    f"cost grows quadratically with N"
                )
            return ScaleGrid.full(n, dt, max_k)
        return ScaleGrid.log_spaced(n, dt, count or settings.DEFAULT_SCALE_COUNT, max_k)

    def cwt(
        self,
        x: TimeSeries,
        basis: WaveletBasis,
        grid: ScaleGrid,
        remove_mean: bool = False,
    ) -> WaveletMatrix:
        """
        Discrete continuous wavelet transform

        Args:
            x: Input series
            basis: Mother wavelet and normalization
            grid: Widths to evaluate; grid.dt must equal x.dt
            remove_mean: Subtract the series mean first; off by default, giving
                W(m, k) = sum_n x_n conj(psi_n(m, k)) on the raw samples

        Returns:
            WaveletMatrix of shape N x |k_values|
        """
        if not math.isclose(grid.dt, x.dt, rel_tol=1e-9):
            raise DimensionMismatchError(
                f"Scale grid dt={grid.dt:g} does not match series dt={x.dt:g}",
                {"grid_dt": grid.dt, "series_dt": x.dt},
            )
        if grid.k_max > x.n - 1:
            raise InvalidScaleError(
                f"Largest width k={grid.k_max} exceeds N-1={x.n - 1} for '{x.label}'",
                {"k_max": grid.k_max, "n": x.n},
            )
        if basis.kind == BasisKind.MORLET:
            _check_epsilon(basis.epsilon)

        values = centered(x.values) if remove_mean else np.asarray(x.values, dtype=np.float64)
        n = x.n
        coefficients = np.zeros((n, grid.size), dtype=np.complex128)

        def transform_column(j: int) -> None:
            offsets, kernel = wavelet_kernel(basis, int(grid.k_values[j]))
            keep = np.abs(offsets) <= n - 1
            offsets, kernel = offsets[keep], kernel[keep]
            radius = int(max(-offsets[0], offsets[-1]))
            padded = np.zeros(2 * radius + 1, dtype=kernel.dtype)
            padded[offsets + radius] = kernel
            # correlation with the kernel as a convolution with its reversed conjugate
            full = signal.convolve(values, np.conj(padded)[::-1], mode="full", method="auto")
            coefficients[:, j] = full[radius:radius + n]

        if self.workers > 1 and grid.size > 1:
            with ThreadPoolExecutor(max_workers=self.workers) as pool:
                list(pool.map(transform_column, range(grid.size)))
        else:
            for j in range(grid.size):
                transform_column(j)

        mask, radii = coi_mask(n, grid, basis)
        logger.debug(f"CWT of '{x.label}': N={n}, {grid.size} scales, basis={basis.kind.value}")
        return WaveletMatrix(
            coefficients=coefficients,
            scale_grid=grid,
            basis=basis,
            coi_mask=mask,
            coi_radii=radii,
            source_label=x.label,
            units=x.units,
        )

    def wavelet_spectrum(self, w: WaveletMatrix, coi_only: bool = True) -> WaveletSpectrum:
        """
        Per-scale sample variance of the coefficients

        Scales with fewer than two usable coefficients are dropped with a warning.
        """
        if w.coefficients.size == 0:
            raise EmptyMatrixError("wavelet matrix is empty")

        kept, sigma2, n_used, dropped = [], [], [], []
        for j, k in enumerate(w.scale_grid.k_values):
            column = w.coefficients[:, j]
            if coi_only:
                column = column[w.coi_mask[:, j]]
            if column.size < 2:
                dropped.append(int(k))
                continue
            deviations = column - column.mean()
            kept.append(j)
            sigma2.append(float(np.sum(deviations.real ** 2 + deviations.imag ** 2) / (column.size - 1)))
            n_used.append(column.size)

        if dropped:
            logger.warning(
                f"Wavelet spectrum of '{w.source_label}' dropped {len(dropped)} scales with fewer than "
                f"2 coefficients inside the cone of influence: k={dropped}"
            )
        if not kept:
            raise EmptyMatrixError(
                f"No scale of '{w.source_label}' keeps 2 coefficients inside the cone of influence"
            )

        kept = np.array(kept, dtype=np.int64)
        return WaveletSpectrum(
            k_values=w.scale_grid.k_values[kept],
            inverse_widths=w.scale_grid.inverse_widths[kept],
            sigma2=np.array(sigma2, dtype=np.float64),
            n_used=np.array(n_used, dtype=np.int64),
            basis=w.basis,
            coi_only=coi_only,
            dropped_k=dropped,
        )

    def scale_cutoff(self, n: int, grid: ScaleGrid, basis: WaveletBasis) -> ScaleGrid:
        """
        Keep the widths whose cone of influence leaves at least
        COI_TRUST_FRACTION of the record trustworthy

        Args:
            n: Series length
            grid: Candidate widths
            basis: Basis that sets the cone radius

        Returns:
            ScaleGrid with the retained widths
        """
        trust = Fraction(settings.COI_TRUST_FRACTION).limit_denominator(10 ** 6)
        keep = np.array(
            [(n - 2 * coi_radius(int(k), basis)) * trust.denominator >= trust.numerator * n
             for k in grid.k_values],
            dtype=bool,
        )
        if not keep.any():
            raise ScaleCutoffError(
                f"No width keeps {float(trust):.0%} of N={n} samples outside the cone of influence "
                f"(smallest k={int(grid.k_values[0])}, basis={basis.kind.value})",
                {"n": n, "basis": basis.kind.value},
            )
        retained = grid.subset(keep)
        logger.info(
            f"Cutoff kept {retained.size}/{grid.size} scales for {basis.kind.value} at N={n} "
            f"(k <= {retained.k_max})"
        )
        return retained

    @staticmethod
    def normalised_magnitude(w: WaveletMatrix) -> np.ndarray:
        """|W| divided by its largest value; an all-zero matrix stays zero"""
        magnitude = np.abs(w.coefficients)
        peak = float(magnitude.max()) if magnitude.size else 0.0
        return magnitude / peak if peak > 0 else magnitude

    @staticmethod
    def pseudo_frequencies(basis: WaveletBasis, grid: ScaleGrid) -> np.ndarray:
        """Approximate frequency in Hz of each width for axis overlays"""
        if basis.kind == BasisKind.MORLET:
            return basis.epsilon / (2.0 * np.pi * grid.widths)
        return grid.inverse_widths
