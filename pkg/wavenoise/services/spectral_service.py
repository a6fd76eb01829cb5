# wavenoise/services/spectral_service.py
"""
Fourier-side estimators: periodogram, Welch PSD, cross-PSD and coherence
All spectra are one-sided densities with the zero-frequency bin removed.
"""
import logging
from typing import Optional, Tuple

import numpy as np
from scipy import signal

from wavenoise.core.config import settings
from wavenoise.core.errors import SegmentationError
from wavenoise.schemas.spectrum import CoherenceSpectrum, Estimator, Spectrum, WindowKind
from wavenoise.schemas.timeseries import TimeSeries
from wavenoise.services.timeseries_service import TimeSeriesService

logger = logging.getLogger(__name__)


class SpectralService:
    """Service class for Fourier spectral estimates"""

    def __init__(
        self,
        segments: Optional[int] = None,
        overlap: Optional[float] = None,
        window: Optional[WindowKind] = None,
    ):
        self.segments = segments or settings.WELCH_SEGMENTS
        self.overlap = settings.WELCH_OVERLAP if overlap is None else overlap
        self.window = WindowKind(window or settings.WELCH_WINDOW)

    def segmentation(
        self,
        n: int,
        segments: Optional[int] = None,
        overlap: Optional[float] = None,
    ) -> Tuple[int, int, int]:
        """
        Segment length, overlap and resulting segment count for a Welch estimate

        Args:
            n: Series length
            segments: Requested number of segments
            overlap: Fractional overlap between neighbouring segments

        Returns:
            (nperseg, noverlap, n_segments)
        """
        segments = self.segments if segments is None else segments
        overlap = self.overlap if overlap is None else overlap
        if segments < 1:
            raise SegmentationError(f"segment count must be positive, got {segments}")
        if not 0.0 <= overlap < 1.0:
            raise SegmentationError(f"overlap must lie in [0, 1), got {overlap}")

        if segments == 1:
            nperseg, noverlap = n, 0
        else:
            nperseg = int(n / (segments - overlap * (segments - 1)))
            noverlap = int(overlap * nperseg)
        if nperseg < settings.MIN_SEGMENT_LENGTH:
            raise SegmentationError(
                f"{segments} segments of a {n}-sample series are {nperseg} samples long; "
                f"at least {settings.MIN_SEGMENT_LENGTH} are required",
                {"n": n, "segments": segments, "segment_length": nperseg},
            )
        n_segments = 1 + (n - nperseg) // (nperseg - noverlap)
        return nperseg, noverlap, n_segments

    # ========================================================================
    # AUTO SPECTRA
    # ========================================================================

    def periodogram(self, x: TimeSeries) -> Spectrum:
        """Rectangular-window periodogram; sum(values) * df equals the population variance"""
        frequencies, values = signal.periodogram(
            x.values, fs=1.0 / x.dt, window="boxcar", detrend="constant",
            return_onesided=True, scaling="density",
        )
        return Spectrum(
            frequencies=frequencies[1:],
            values=values[1:],
            estimator=Estimator.PERIODOGRAM,
            segment_length=x.n,
            overlap_fraction=0.0,
            window=WindowKind.RECT,
            n_segments=1,
            units=f"{x.units}^2/Hz" if x.units else "",
        )

    def welch_psd(
        self,
        x: TimeSeries,
        segments: Optional[int] = None,
        overlap: Optional[float] = None,
        window: Optional[WindowKind] = None,
    ) -> Spectrum:
        """
        Welch-averaged power spectral density

        Args:
            x: Input series
            segments: Number of segments (default WELCH_SEGMENTS)
            overlap: Fractional overlap (default WELCH_OVERLAP)
            window: hann or rect

        Returns:
            Spectrum of demeaned, windowed, overlapped segment periodograms
        """
        window = WindowKind(window or self.window)
        nperseg, noverlap, n_segments = self.segmentation(x.n, segments, overlap)
        frequencies, values = signal.welch(
            x.values, fs=1.0 / x.dt, window=window.scipy_name, nperseg=nperseg,
            noverlap=noverlap, detrend="constant", return_onesided=True,
            scaling="density", average="mean",
        )
        return Spectrum(
            frequencies=frequencies[1:],
            values=values[1:],
            estimator=Estimator.WELCH,
            segment_length=nperseg,
            overlap_fraction=noverlap / nperseg,
            window=window,
            n_segments=n_segments,
            units=f"{x.units}^2/Hz" if x.units else "",
        )

    # ========================================================================
    # CROSS SPECTRA
    # ========================================================================

    def cross_psd(
        self,
        x: TimeSeries,
        y: TimeSeries,
        segments: Optional[int] = None,
        overlap: Optional[float] = None,
        window: Optional[WindowKind] = None,
    ) -> Spectrum:
        """Welch-averaged X * conj(Y) with identical segmentation for both inputs"""
        TimeSeriesService.require_aligned(x, y)
        window = WindowKind(window or self.window)
        nperseg, noverlap, n_segments = self.segmentation(x.n, segments, overlap)
        # scipy's csd(a, b) averages conj(A) * B
        frequencies, values = signal.csd(
            y.values, x.values, fs=1.0 / x.dt, window=window.scipy_name, nperseg=nperseg,
            noverlap=noverlap, detrend="constant", return_onesided=True,
            scaling="density", average="mean",
        )
        units = f"{x.units}*{y.units}/Hz" if (x.units or y.units) else ""
        return Spectrum(
            frequencies=frequencies[1:],
            values=np.asarray(values[1:], dtype=np.complex128),
            estimator=Estimator.WELCH,
            segment_length=nperseg,
            overlap_fraction=noverlap / nperseg,
            window=window,
            n_segments=n_segments,
            units=units,
        )

    def _auto_and_cross(self, x, y, segments, overlap, window):
        sxy = self.cross_psd(x, y, segments, overlap, window)
        if sxy.n_segments < 2:
            raise SegmentationError(
                "coherence needs at least 2 Welch segments; a single segment is identically 1",
                {"segments": sxy.n_segments},
            )
        sxx = self.welch_psd(x, segments, overlap, window)
        syy = self.welch_psd(y, segments, overlap, window)
        return sxx, syy, sxy

    def fourier_coherence(
        self,
        x: TimeSeries,
        y: TimeSeries,
        segments: Optional[int] = None,
        overlap: Optional[float] = None,
        window: Optional[WindowKind] = None,
    ) -> CoherenceSpectrum:
        """
        Magnitude-squared coherence |S_xy|^2 / (S_xx S_yy)

        Bins where either auto-spectrum is zero are undefined (NaN).
        """
        sxx, syy, sxy = self._auto_and_cross(x, y, segments, overlap, window)
        power = sxx.values * syy.values
        defined = power > 0
        values = np.full(power.shape, np.nan)
        values[defined] = np.abs(sxy.values[defined]) ** 2 / power[defined]
        values[defined] = np.clip(values[defined], 0.0, 1.0)
        if not defined.all():
            logger.warning(
                f"Coherence of '{x.label}' and '{y.label}' undefined at {int((~defined).sum())} "
                f"zero-power bins"
            )
        return CoherenceSpectrum(
            frequencies=sxy.frequencies,
            values=values,
            n_segments=sxy.n_segments,
            segment_length=sxy.segment_length,
        )

    def normalised_cross_psd(
        self,
        x: TimeSeries,
        y: TimeSeries,
        segments: Optional[int] = None,
        overlap: Optional[float] = None,
        window: Optional[WindowKind] = None,
    ) -> Spectrum:
        """|S_xy| / sqrt(S_xx S_yy); NaN at zero-power bins"""
        sxx, syy, sxy = self._auto_and_cross(x, y, segments, overlap, window)
        power = sxx.values * syy.values
        values = np.full(power.shape, np.nan)
        defined = power > 0
        values[defined] = np.clip(np.abs(sxy.values[defined]) / np.sqrt(power[defined]), 0.0, 1.0)
        return sxy.model_copy(update={"values": values, "units": ""})

    @staticmethod
    def fourier_component(x: TimeSeries, frequency: float) -> Tuple[np.ndarray, float]:
        """
        Single-bin Fourier reconstruction of x at the bin nearest `frequency`

        Args:
            x: Series
            frequency: Target frequency in Hz

        Returns:
            (component, bin_frequency); the component is the real sinusoid that
            bin contributes to the mean-removed series
        """
        coefficients = np.fft.rfft(x.values - x.values.mean())
        frequencies = np.fft.rfftfreq(x.n, d=x.dt)
        index = int(np.argmin(np.abs(frequencies - frequency)))
        kept = np.zeros_like(coefficients)
        kept[index] = coefficients[index]
        return np.fft.irfft(kept, n=x.n), float(frequencies[index])

    @staticmethod
    def loglog_slope(
        frequencies: np.ndarray,
        values: np.ndarray,
        f_min: Optional[float] = None,
        f_max: Optional[float] = None,
    ) -> float:
        """Least-squares slope of log(values) against log(frequencies) inside a band"""
        frequencies = np.asarray(frequencies, dtype=np.float64)
        values = np.abs(np.asarray(values))
        keep = (frequencies > 0) & (values > 0) & np.isfinite(values)
        if f_min is not None:
            keep &= frequencies >= f_min
        if f_max is not None:
            keep &= frequencies <= f_max
        if np.count_nonzero(keep) < 2:
            raise ValueError("need at least two positive bins to fit a slope")
        slope, _ = np.polyfit(np.log(frequencies[keep]), np.log(values[keep]), 1)
        return float(slope)
