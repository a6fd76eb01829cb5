# wavenoise/tests/test_services/test_correlation_service.py
import logging
import time

import numpy as np
import pytest

from wavenoise.core.errors import DimensionMismatchError, InsufficientSeriesError, UnsupportedBasisError
from wavenoise.schemas.correlation import PearsonComponent
from wavenoise.schemas.timeseries import SeriesSet, TimeSeries
from wavenoise.schemas.wavelet import BasisKind, ScaleGrid
from wavenoise.services.correlation_service import CorrelationService, scale_averaging_matrix
from wavenoise.services.synth_service import SynthService
from wavenoise.services.wavelet_service import WaveletService
from wavenoise.tests.oracles import HAAR, MORLET

wavelets = WaveletService()
service = CorrelationService(wavelets)
synth = SynthService()


def _pair(preset: str, n: int, seed: int = 0) -> SeriesSet:
    return synth.gen_ensemble(synth.preset(preset, n=n, seed=seed))


# ============================================================================
# SMOOTHING
# ============================================================================

def test_scale_averaging_rows_are_averages():
    matrix = scale_averaging_matrix(np.array([10, 12, 14]), 0.6)
    np.testing.assert_allclose(matrix.sum(axis=1), 1.0)
    np.testing.assert_allclose(matrix[1], [1 / 3, 1 / 3, 1 / 3])
    np.testing.assert_allclose(matrix[0], [0.5, 0.5, 0.0])


def test_scale_averaging_of_sparse_grid_is_identity():
    np.testing.assert_array_equal(scale_averaging_matrix(np.array([2, 4, 8]), 0.6), np.eye(3))


def test_smooth_map_is_a_weighted_average(white, small_grid):
    grid = small_grid([2, 4, 6, 8, 16])
    values = np.abs(white(n=300, seed=4).values)[:, None] * np.arange(1, 6)[None, :]
    smoothed = service.smooth_map(values, grid)
    assert smoothed.shape == values.shape
    assert smoothed.min() >= values.min() - 1e-9
    assert smoothed.max() <= values.max() + 1e-9

    constant = np.full((300, 5), 2.5)
    np.testing.assert_allclose(service.smooth_map(constant, grid), 2.5, rtol=1e-9)


def test_smooth_map_shape_mismatch(small_grid):
    with pytest.raises(DimensionMismatchError):
        service.smooth_map(np.zeros((50, 3)), small_grid([2, 4]))


# ============================================================================
# WAVELET COHERENCE
# ============================================================================

def test_coherence_with_itself_is_one(white):
    x = white(n=1024, seed=1)
    grid = wavelets.build_grid(x.n, x.dt, max_k=128)
    coherence = service.wavelet_coherence(x, x, grid)
    np.testing.assert_allclose(coherence.interior_values(), 1.0, atol=1e-9)


def test_coherence_is_symmetric_and_bounded(white):
    x, y = white(n=1024, seed=2), white(n=1024, seed=3, label="y")
    grid = wavelets.build_grid(x.n, x.dt, max_k=128)
    forward = service.wavelet_coherence(x, y, grid)
    backward = service.wavelet_coherence(y, x, grid)
    np.testing.assert_array_equal(forward.values, backward.values)
    assert np.all((forward.values >= 0.0) & (forward.values <= 1.0))
    assert forward.labels == ("x", "y")


def test_coherence_rejects_haar(white):
    x = white(n=256)
    with pytest.raises(UnsupportedBasisError):
        service.wavelet_coherence(x, x, wavelets.build_grid(x.n, x.dt, max_k=32), basis=HAAR)


def test_independent_noise_has_low_coherence(white):
    x, y = white(n=2048, seed=20), white(n=2048, seed=21, label="y")
    grid = wavelets.build_grid(x.n, x.dt, max_k=256)
    coherence = service.wavelet_coherence(x, y, grid)
    assert float(np.median(coherence.interior_values())) <= 0.6


def test_coherence_ignores_affine_changes(white):
    x, y = white(n=2048, seed=4), white(n=2048, seed=5, label="y")
    y = y.with_values(0.5 * x.values + y.values)
    grid = wavelets.build_grid(x.n, x.dt, max_k=256)
    base = service.wavelet_coherence(x, y, grid)
    moved = service.wavelet_coherence(
        x.with_values(-2.5 * x.values + 40.0), y.with_values(0.125 * y.values - 3.0), grid
    )
    np.testing.assert_allclose(moved.interior_values(), base.interior_values(), rtol=0, atol=1e-9)


def _burst_patch_and_outside(seed: int):
    pair = _pair("shared_burst", n=4096, seed=seed)
    grid = wavelets.build_grid(pair.n, pair.dt, max_k=256)
    coherence = service.wavelet_coherence(pair[0], pair[1], grid)

    n = pair.n
    burst_start, burst_end = 0.4 * n, 0.6 * n
    matched_k = 64.0 * MORLET.epsilon / (2.0 * np.pi)
    t = np.arange(n)

    patch, outside = [], []
    for j, k in enumerate(grid.k_values):
        column = coherence.values[:, j]
        inside_cone = coherence.coi_mask[:, j]
        if matched_k / 1.3 <= k <= matched_k * 1.3:
            rows = (t >= burst_start + 3 * k) & (t <= burst_end - 3 * k)
            patch.append(column[rows])
        far = (t < burst_start - 4 * k) | (t > burst_end + 4 * k)
        outside.append(column[far & inside_cone])

    return np.concatenate(patch), np.concatenate(outside)


def test_shared_burst_is_localized():
    patch, outside = _burst_patch_and_outside(seed=0)
    assert patch.size > 0
    assert float(np.mean(patch)) >= 0.8
    assert float(np.median(outside)) <= 0.6


@pytest.mark.slow
def test_shared_burst_is_localized_across_seeds():
    for seed in range(20):
        patch, outside = _burst_patch_and_outside(seed)
        assert float(np.mean(patch)) >= 0.8, f"seed {seed}"
        assert float(np.median(outside)) <= 0.6, f"seed {seed}"

        rng = np.random.default_rng(1000 + seed)
        x = TimeSeries(label="x", dt=1.0, values=rng.standard_normal(4096))
        y = TimeSeries(label="y", dt=1.0, values=rng.standard_normal(4096))
        grid = wavelets.build_grid(x.n, x.dt, max_k=256)
        assert float(np.median(service.wavelet_coherence(x, y, grid).interior_values())) <= 0.6, f"seed {seed}"


# ============================================================================
# SCALEWISE PEARSON
# ============================================================================

@pytest.mark.parametrize("basis", [HAAR, MORLET])
def test_pearson_of_identical_and_negated_series(white, basis):
    x = white(n=1024, seed=6)
    grid = wavelets.build_grid(x.n, x.dt, max_k=64)
    wx = wavelets.cwt(x, basis, grid)
    wneg = wavelets.cwt(x.with_values(-x.values), basis, grid)

    same = service.scalewise_pearson(wx, wx)
    assert [entry.r for entry in same.entries] == pytest.approx([1.0] * len(same.entries))
    opposite = service.scalewise_pearson(wx, wneg)
    assert [entry.r for entry in opposite.entries] == pytest.approx([-1.0] * len(opposite.entries))
    assert all(0.0 <= entry.r2 <= 1.0 for entry in opposite.entries)


def test_pearson_auto_component():
    x = TimeSeries(dt=1.0, values=np.sin(np.arange(256) / 5.0))
    grid = ScaleGrid(k_values=[4, 8], dt=1.0)
    assert service.scalewise_pearson(
        wavelets.cwt(x, HAAR, grid), wavelets.cwt(x, HAAR, grid)
    ).component == PearsonComponent.AUTO


def test_pearson_auto_is_the_real_part_for_morlet(white):
    x, y = white(n=1024, seed=11), white(n=1024, seed=12, label="y")
    y = y.with_values(0.8 * x.values + y.values)
    grid = wavelets.build_grid(x.n, x.dt, max_k=128)
    wx, wy = wavelets.cwt(x, MORLET, grid), wavelets.cwt(y, MORLET, grid)
    auto = service.scalewise_pearson(wx, wy)
    real = service.scalewise_pearson(wx, wy, PearsonComponent.REAL)
    magnitude = service.scalewise_pearson(wx, wy, PearsonComponent.MAGNITUDE)
    assert [entry.r for entry in auto.entries] == [entry.r for entry in real.entries]
    assert [entry.r for entry in auto.entries] != [entry.r for entry in magnitude.entries]


@pytest.mark.parametrize("basis", [HAAR, MORLET])
def test_independent_noise_has_low_mean_r2(white, basis):
    x, y = white(n=4096, seed=30), white(n=4096, seed=31, label="y")
    grid = wavelets.scale_cutoff(x.n, wavelets.build_grid(x.n, x.dt), basis)
    result = service.scalewise_pearson(wavelets.cwt(x, basis, grid), wavelets.cwt(y, basis, grid))
    assert len(result.entries) == grid.size
    assert result.mean_r2() <= 0.1


def test_pearson_requires_matching_matrices(white):
    grid = ScaleGrid(k_values=[2, 4, 8], dt=1.0)
    wx = wavelets.cwt(white(n=200), HAAR, grid)
    with pytest.raises(DimensionMismatchError):
        service.scalewise_pearson(wx, wavelets.cwt(white(n=180), HAAR, grid))
    with pytest.raises(DimensionMismatchError):
        service.scalewise_pearson(wx, wavelets.cwt(white(n=200), MORLET, grid))


def test_pearson_omits_constant_columns(white, caplog):
    grid = ScaleGrid(k_values=[2, 4, 8], dt=1.0)
    flat = wavelets.cwt(TimeSeries(label="flat", dt=1.0, values=np.full(200, 7.0)), HAAR, grid)
    wx = wavelets.cwt(white(n=200), HAAR, grid)
    with caplog.at_level(logging.WARNING):
        result = service.scalewise_pearson(wx, flat, coi_only=False)
    assert result.entries == []
    assert result.omitted_k == [2, 4, 8]
    assert "zero-variance" in caplog.text


def test_pearson_without_cone_uses_every_translation(white):
    x, y = white(n=512, seed=1), white(n=512, seed=2, label="y")
    grid = ScaleGrid(k_values=[2, 16, 64], dt=1.0)
    result = service.scalewise_pearson(wavelets.cwt(x, MORLET, grid), wavelets.cwt(y, MORLET, grid), coi_only=False)
    assert [entry.n_used for entry in result.entries] == [512, 512, 512]
    inside = service.scalewise_pearson(wavelets.cwt(x, MORLET, grid), wavelets.cwt(y, MORLET, grid))
    assert inside.at_k(64).n_used == 512 - 2 * int(np.ceil(np.sqrt(2.0) * 64))


def test_morlet_resolves_a_slow_sinusoid_better_than_haar():
    pair = _pair("slow_sinusoid", n=8192, seed=0)
    grid = wavelets.build_grid(pair.n, pair.dt, max_k=1024)

    clean = TimeSeries(dt=1.0, values=np.sqrt(2.0) * np.sin(2 * np.pi * np.arange(pair.n) / 128.0))
    clean_spectrum = wavelets.wavelet_spectrum(wavelets.cwt(clean, MORLET, grid))
    matched_k = int(clean_spectrum.k_values[int(np.argmax(clean_spectrum.sigma2))])

    morlet = service.scalewise_pearson(
        wavelets.cwt(pair[0], MORLET, grid), wavelets.cwt(pair[1], MORLET, grid)
    )
    haar = service.scalewise_pearson(wavelets.cwt(pair[0], HAAR, grid), wavelets.cwt(pair[1], HAAR, grid))
    assert morlet.at_k(matched_k).r2 >= haar.best().r2


@pytest.mark.slow
def test_shared_fluctuator_peaks_near_its_dwell_time():
    dwell = 50
    hits = 0
    for seed in range(20):
        pair = _pair("rts_pair", n=8192, seed=seed)
        grid = wavelets.build_grid(pair.n, pair.dt, max_k=1024)
        result = service.scalewise_pearson(wavelets.cwt(pair[0], HAAR, grid), wavelets.cwt(pair[1], HAAR, grid))
        if dwell / 2 <= result.best().k <= 4 * dwell:
            hits += 1
    assert hits >= 18


def test_shared_drift_peaks_at_the_longest_scales():
    pair = _pair("shared_drift", n=8192, seed=0)
    grid = wavelets.scale_cutoff(pair.n, wavelets.build_grid(pair.n, pair.dt), HAAR)
    result = service.scalewise_pearson(wavelets.cwt(pair[0], HAAR, grid), wavelets.cwt(pair[1], HAAR, grid))
    longest = sorted(entry.k for entry in result.entries)[-4:]
    assert result.best().k in longest


# ============================================================================
# CORRELATION GRID
# ============================================================================

def test_correlation_grid_of_eight_series():
    series_set = _pair("eight_series", n=4096, seed=0)
    grid = wavelets.build_grid(series_set.n, series_set.dt)
    table = service.correlation_grid(series_set, [HAAR, MORLET], grid, apply_cutoff=True)

    assert len(table.pairs) == 2 * 28
    assert all(pair.var_a != pair.var_b for pair in table.pairs)
    assert table.get("q2_larmor", "q1_larmor", BasisKind.HAAR) is table.get("q1_larmor", "q2_larmor", BasisKind.HAAR)
    assert table.get("q1_rabi", "readout_point", BasisKind.MORLET).basis == BasisKind.MORLET
    with pytest.raises(KeyError):
        table.get("q1_rabi", "q1_rabi")

    linked = {frozenset(("q1_larmor", "q2_larmor")), frozenset(("q1_cz_phase", "exchange_level"))}
    haar_pairs = [pair for pair in table.pairs if pair.correlation.basis == BasisKind.HAAR]
    unrelated = [
        pair.correlation.mean_r2() for pair in haar_pairs
        if frozenset((pair.var_a, pair.var_b)) not in linked
    ]
    assert len(unrelated) == 26
    larmor = table.get("q1_larmor", "q2_larmor", BasisKind.HAAR)
    assert larmor.mean_r2() >= 3.0 * float(np.mean(unrelated))

    fluctuator_k = larmor.best().k
    for pair in haar_pairs:
        if frozenset((pair.var_a, pair.var_b)) in linked:
            continue
        try:
            other = pair.correlation.at_k(fluctuator_k).r2
        except KeyError:
            continue
        assert larmor.best().r2 >= 3.0 * other, f"{pair.var_a}/{pair.var_b}"

    rows = table.rows()
    assert {"var_a", "var_b", "basis", "inv_lambda", "r", "r2", "n_used", "coi_fraction"} <= set(rows[0])


def test_correlation_grid_of_independent_series(white):
    entries = [white(n=4096, seed=40 + i, label=label) for i, label in enumerate(["a", "b", "c"])]
    table = service.correlation_grid(
        SeriesSet(entries=entries), [HAAR, MORLET], wavelets.build_grid(4096, 1.0), apply_cutoff=True
    )
    assert len(table.pairs) == 6
    assert all(pair.correlation.mean_r2() <= 0.1 for pair in table.pairs)


def test_correlation_grid_ignores_affine_changes(white):
    x, y = white(n=2048, seed=50), white(n=2048, seed=51, label="y")
    y = y.with_values(0.6 * x.values + y.values)
    grid = wavelets.build_grid(x.n, x.dt)
    base = service.correlation_grid(SeriesSet(entries=[x, y]), [HAAR, MORLET], grid, apply_cutoff=True)
    moved = service.correlation_grid(
        SeriesSet(entries=[x.with_values(-4.0 * x.values + 7.0), y.with_values(0.3 * y.values - 100.0)]),
        [HAAR, MORLET], grid, apply_cutoff=True,
    )
    for basis in (BasisKind.HAAR, BasisKind.MORLET):
        expected = base.get("x", "y", basis).r2_values
        np.testing.assert_allclose(moved.get("x", "y", basis).r2_values, expected, rtol=0, atol=1e-9)


def test_correlation_grid_of_a_copy_is_one(white):
    x = white(n=1024, seed=52)
    table = service.correlation_grid(
        SeriesSet(entries=[x, x.with_values(x.values, label="copy")]), [HAAR, MORLET], wavelets.build_grid(1024, 1.0)
    )
    for pair in table.pairs:
        np.testing.assert_allclose(pair.correlation.r2_values, 1.0, atol=1e-12)


@pytest.mark.slow
def test_eight_series_pipeline_runtime():
    series_set = _pair("eight_series", n=8192, seed=1)
    start = time.perf_counter()
    grid = wavelets.build_grid(series_set.n, series_set.dt)
    table = service.correlation_grid(series_set, [HAAR, MORLET], grid, apply_cutoff=True)
    assert time.perf_counter() - start <= 60.0
    assert len(table.pairs) == 56


def test_correlation_grid_needs_two_series(white):
    x = white(n=256)
    with pytest.raises(InsufficientSeriesError):
        service.correlation_grid(SeriesSet(entries=[x]), [HAAR], ScaleGrid(k_values=[2, 4], dt=1.0))
