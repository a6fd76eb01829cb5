# wavenoise/tests/test_services/test_spectral_service.py
import logging
import math

import numpy as np
import pytest

from wavenoise.core.errors import DimensionMismatchError, SegmentationError
from wavenoise.schemas.spectrum import Estimator, WindowKind
from wavenoise.schemas.timeseries import TimeSeries
from wavenoise.services.spectral_service import SpectralService
from wavenoise.services.synth_service import SynthService

service = SpectralService()


# ============================================================================
# PERIODOGRAM
# ============================================================================

def test_periodogram_of_bin_centred_sinusoid():
    n, amplitude = 1024, 2.0
    f0 = 50.0 / n
    x = TimeSeries(dt=1.0, values=amplitude * np.sin(2 * np.pi * f0 * np.arange(n)))
    spectrum = service.periodogram(x)
    assert spectrum.estimator == Estimator.PERIODOGRAM
    assert spectrum.frequencies[0] > 0
    assert spectrum.frequencies[int(np.argmax(spectrum.values))] == pytest.approx(f0)
    assert spectrum.integrated_power() == pytest.approx(amplitude ** 2 / 2, rel=1e-9)


def test_periodogram_parseval(white):
    x = white(n=1000, seed=5, dt=0.5)
    spectrum = service.periodogram(x)
    assert spectrum.df == pytest.approx(1.0 / (x.n * x.dt))
    assert spectrum.integrated_power() == pytest.approx(float(np.var(x.values)), rel=1e-9)


def test_periodogram_of_constant_is_zero():
    spectrum = service.periodogram(TimeSeries(dt=1.0, values=np.full(64, 3.0)))
    assert np.all(spectrum.values == 0)


# ============================================================================
# WELCH
# ============================================================================

def test_welch_white_noise_level(white):
    x = white(n=2 ** 14, seed=3)
    spectrum = service.welch_psd(x)
    assert spectrum.n_segments == 8
    assert spectrum.window == WindowKind.HANN
    # one-sided density of unit white noise at dt = 1
    assert float(np.mean(spectrum.values)) == pytest.approx(2.0, rel=0.1)
    blocks = spectrum.values[: spectrum.values.size // 64 * 64].reshape(-1, 64).mean(axis=1)
    assert np.all(np.abs(blocks / np.mean(spectrum.values) - 1.0) < 0.3)


def test_single_rect_segment_equals_periodogram(white):
    x = white(n=777, seed=8)
    welch = service.welch_psd(x, segments=1, window=WindowKind.RECT)
    periodogram = service.periodogram(x)
    np.testing.assert_array_equal(welch.values, periodogram.values)
    np.testing.assert_array_equal(welch.frequencies, periodogram.frequencies)


def test_segmentation():
    assert service.segmentation(4096, 8, 0.5) == (910, 455, 8)
    assert service.segmentation(100, 1, 0.5) == (100, 0, 1)
    with pytest.raises(SegmentationError):
        service.segmentation(32, 8, 0.5)
    with pytest.raises(SegmentationError):
        service.segmentation(1000, 8, 1.0)
    with pytest.raises(SegmentationError):
        service.segmentation(1000, 0, 0.5)


def test_welch_peak_of_a_sinusoid(white):
    f0 = 0.1234
    noise = white(n=4096, seed=6, sigma=0.5)
    x = noise.with_values(np.sin(2 * np.pi * f0 * np.arange(noise.n)) + noise.values)
    spectrum = service.welch_psd(x)
    assert abs(spectrum.frequencies[int(np.argmax(spectrum.values))] - f0) <= spectrum.df


def test_welch_slope_of_colored_noise():
    for beta in (0.0, 1.0):
        x = SynthService().gen_colored(2 ** 15, 1.0, beta, seed=2)
        spectrum = service.welch_psd(x)
        slope = SpectralService.loglog_slope(spectrum.frequencies, spectrum.values)
        assert slope == pytest.approx(-beta, abs=0.15)


# ============================================================================
# CROSS SPECTRA AND COHERENCE
# ============================================================================

def test_cross_psd_of_series_with_itself(white):
    x = white(n=4096, seed=1)
    cross = service.cross_psd(x, x)
    assert cross.is_complex
    np.testing.assert_allclose(cross.values.real, service.welch_psd(x).values, rtol=1e-12)
    assert np.max(np.abs(cross.values.imag)) <= 1e-12 * np.max(np.abs(cross.values))


def test_cross_psd_is_hermitian(white):
    x, y = white(n=4096, seed=3), white(n=4096, seed=4, label="y")
    y = y.with_values(0.6 * x.values + y.values)
    forward = service.cross_psd(x, y).values
    backward = service.cross_psd(y, x).values
    np.testing.assert_allclose(forward, np.conj(backward), rtol=1e-12, atol=1e-14 * np.max(np.abs(forward)))


def test_cross_psd_phase_convention():
    n, delay = 4096, 2
    frequency = 1.0 / 16.0
    t = np.arange(n)
    x = TimeSeries(label="x", dt=1.0, values=np.cos(2 * np.pi * frequency * t))
    y = TimeSeries(label="y", dt=1.0, values=np.cos(2 * np.pi * frequency * (t - delay)))
    cross = service.cross_psd(x, y)
    peak = int(np.argmax(np.abs(cross.values)))
    # X * conj(Y) leads by 2 pi f delay when y lags x
    assert np.angle(cross.values[peak]) == pytest.approx(2 * np.pi * frequency * delay, abs=0.05)


def test_coherence_of_affine_copy_is_one(white):
    x = white(n=4096, seed=2)
    y = x.with_values(2.0 * x.values + 1.0, label="y")
    coherence = service.fourier_coherence(x, y)
    values = coherence.values[coherence.defined]
    assert values.size == coherence.values.size
    np.testing.assert_allclose(values, 1.0, atol=1e-9)


def test_coherence_ignores_amplitude_scaling(white):
    x, y = white(n=4096, seed=7), white(n=4096, seed=8, label="y")
    y = y.with_values(0.4 * x.values + y.values)
    base = service.fourier_coherence(x, y).values
    scaled = service.fourier_coherence(x.with_values(-3.0 * x.values), y.with_values(0.25 * y.values)).values
    np.testing.assert_allclose(scaled, base, rtol=0, atol=1e-12)


def test_shared_sinusoid_is_coherent_at_its_frequency():
    n = 4096
    f0 = 91.0 / 910.0
    signal = np.sqrt(2.0) * np.sin(2 * np.pi * f0 * np.arange(n))
    for seed in range(20):
        rng = np.random.default_rng(seed)
        x = TimeSeries(label="x", dt=1.0, values=signal + rng.standard_normal(n))
        y = TimeSeries(label="y", dt=1.0, values=signal + rng.standard_normal(n))
        coherence = service.fourier_coherence(x, y)
        nearest = int(np.argmin(np.abs(coherence.frequencies - f0)))
        assert coherence.values[nearest] >= 0.8


def test_independent_noise_is_incoherent(white):
    x, y = white(n=8192, seed=10), white(n=8192, seed=11, label="y")
    assert float(np.median(service.fourier_coherence(x, y).values)) <= 0.35
    assert float(np.nanmedian(service.normalised_cross_psd(x, y).values)) <= 0.45


def test_coherence_values_stay_in_unit_interval(white):
    x, y = white(n=2048, seed=12), white(n=2048, seed=13, label="y")
    y = y.with_values(0.5 * x.values + y.values)
    values = service.fourier_coherence(x, y).values
    assert np.all((values >= 0.0) & (values <= 1.0))


def test_zero_power_bins_are_undefined(white, caplog):
    x = white(n=1024, seed=1)
    flat = TimeSeries(label="flat", dt=1.0, values=np.full(1024, 4.0))
    with caplog.at_level(logging.WARNING):
        coherence = service.fourier_coherence(x, flat)
    assert not coherence.defined.any()
    assert "undefined" in caplog.text


def test_coherence_needs_two_segments(white):
    x, y = white(n=512, seed=1), white(n=512, seed=2)
    with pytest.raises(SegmentationError):
        service.fourier_coherence(x, y, segments=1)


def test_cross_psd_requires_alignment(white):
    with pytest.raises(DimensionMismatchError):
        service.cross_psd(white(n=512), white(n=500))


def test_loglog_slope():
    frequencies = np.linspace(0.01, 0.5, 200)
    assert SpectralService.loglog_slope(frequencies, frequencies ** -2.0) == pytest.approx(-2.0)
    assert SpectralService.loglog_slope(frequencies, 3 * frequencies ** 0.5, f_min=0.1) == pytest.approx(0.5)
    with pytest.raises(ValueError):
        SpectralService.loglog_slope(frequencies, np.zeros(200))
    assert math.isfinite(SpectralService.loglog_slope(frequencies, np.ones(200)))


def test_fourier_component_recovers_a_bin_centred_sinusoid(white):
    n = 1024
    t = np.arange(n)
    tone = 0.8 * np.cos(2 * np.pi * 32 * t / n + 0.3)
    x = TimeSeries(dt=0.5, values=tone + 5.0)
    component, frequency = service.fourier_component(x, 32 / (n * 0.5) + 0.0001)
    assert frequency == pytest.approx(32 / (n * 0.5))
    np.testing.assert_allclose(component, tone, atol=1e-9)

    noisy = x.with_values(tone + white(n=n, seed=9, sigma=0.1).values)
    residual, _ = service.fourier_component(noisy, frequency)
    assert np.max(np.abs(residual - tone)) < 0.05
