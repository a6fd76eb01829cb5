# wavenoise/cli/commands.py
"""
Subcommand implementations
Each command takes a validated RunConfig, writes its tables and figures under
config.out and returns a JSON-serializable summary.
"""
import logging
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional

import numpy as np

from wavenoise.core.config import settings
from wavenoise.core.errors import ConfigValidationError
from wavenoise.schemas.run_config import RunConfig
from wavenoise.schemas.timeseries import SeriesSet, TimeSeries
from wavenoise.schemas.wavelet import BasisKind, ScaleGrid, WaveletBasis, WaveletMatrix, WaveletSpectrum
from wavenoise.services.correlation_service import CorrelationService
from wavenoise.services.spectral_service import SpectralService
from wavenoise.services.synth_service import SynthService
from wavenoise.services.timeseries_service import TimeSeriesService
from wavenoise.services.variance_service import VarianceService
from wavenoise.services.wavelet_service import WaveletService, coi_fraction
from wavenoise.utils.file_handler import write_csv_table, write_json, write_matrix_csv, write_rows
from wavenoise.utils.plotting import render_heatmap, render_spectra

logger = logging.getLogger(__name__)


# ============================================================================
# SHARED HELPERS
# ============================================================================

def _output_dir(config: RunConfig) -> Path:
    return settings.get_output_path(config.out)


def _timeseries_service(config: RunConfig) -> TimeSeriesService:
    return TimeSeriesService(delimiter=config.delimiter)


def _require_inputs(config: RunConfig, minimum: int, maximum: Optional[int] = None) -> None:
    count = len(config.inputs)
    if count < minimum or (maximum is not None and count > maximum):
        expected = f"at least {minimum}" if maximum is None else f"exactly {minimum}"
        raise ConfigValidationError(
            f"'{config.command}' takes {expected} input file(s), got {count}",
            {"inputs": config.inputs},
        )


def _load(config: RunConfig) -> List[TimeSeries]:
    """Load every input and drop the requested leading segment"""
    service = _timeseries_service(config)
    loaded = []
    for path in config.inputs:
        series = service.load_csv(path, config.time_column, config.value_column, config.units or "")
        loaded.append(service.trim_start(series, config.trim_start))
    return loaded


def _load_aligned(config: RunConfig) -> SeriesSet:
    raw = _load(config)
    labels = [series.label for series in raw]
    if len(set(labels)) != len(labels):
        # same value column in several files; fall back to file stems
        raw = [series.with_values(series.values, label=Path(path).stem) for series, path in zip(raw, config.inputs)]
    series_set = _timeseries_service(config).align_to_coarsest(raw)
    dropped = {label: count for label, count in series_set.dropped.items() if count}
    if dropped:
        logger.info(f"Alignment to dt={series_set.dt:g} s dropped samples: {dropped}")
    return series_set


def _grid(config: RunConfig, wavelet_service: WaveletService, n: int, dt: float) -> ScaleGrid:
    return wavelet_service.build_grid(n, dt, config.grid_mode, config.scale_count, config.max_k)


def _spectrum_columns(spectrum: WaveletSpectrum) -> Dict[str, Any]:
    return {
        "k": spectrum.k_values,
        "inv_lambda": spectrum.inverse_widths,
        "sigma2": spectrum.sigma2,
        "sigma4": spectrum.sigma4,
        "normalised_sigma2": spectrum.normalised(),
        "n_used": spectrum.n_used,
    }


def _coi_columns(w: WaveletMatrix) -> Dict[str, Any]:
    return {
        "k": w.scale_grid.k_values,
        "inv_lambda": w.scale_grid.inverse_widths,
        "coi_radius": w.coi_radii,
        "coi_fraction": [coi_fraction(w.n, int(k), w.basis) for k in w.scale_grid.k_values],
    }


# ============================================================================
# COMMANDS
# ============================================================================

def cmd_synth(config: RunConfig) -> Dict[str, Any]:
    """Generate a recipe or preset ensemble and write one CSV per series"""
    synth = SynthService()
    if config.recipe and config.preset:
        raise ConfigValidationError("give either --recipe or --preset, not both")
    if config.recipe:
        recipe = synth.load_recipe(config.recipe)
        if config.seed is not None:
            recipe = recipe.model_copy(update={"seed": config.seed})
    elif config.preset:
        recipe = synth.preset(config.preset, config.n, config.dt, config.seed or 0)
    else:
        raise ConfigValidationError("synth needs --recipe PATH or --preset NAME")

    series_set = synth.gen_ensemble(recipe)
    out = _output_dir(config)
    service = _timeseries_service(config)
    files = []
    for series in series_set.entries:
        files.append(str(service.write_csv(series, out / f"{series.label}.csv", config.time_column)))
    write_json(out / "recipe.json", recipe.model_dump(mode="json"))

    logger.info(f"Wrote {len(files)} series to {out}")
    return {"recipe": recipe.name, "seed": recipe.seed, "n": recipe.n, "dt": recipe.dt, "files": files}


def cmd_cwt(config: RunConfig) -> Dict[str, Any]:
    """Wavelet matrix and cone of influence of one series"""
    _require_inputs(config, 1, 1)
    x = _load(config)[0]
    wavelet_service = WaveletService(workers=config.workers)
    grid = _grid(config, wavelet_service, x.n, x.dt)
    out = _output_dir(config)

    summary: Dict[str, Any] = {"label": x.label, "n": x.n, "dt": x.dt, "scales": grid.size}
    for basis in config.bases():
        name = basis.kind.value
        w = wavelet_service.cwt(x, basis, grid)
        metadata = w.metadata()
        if basis.kind == BasisKind.MORLET:
            write_matrix_csv(out / f"cwt_{name}_magnitude.csv", np.abs(w.coefficients), "time", x.times,
                             grid.k_values, {**metadata, "quantity": "|W|"})
            write_matrix_csv(out / f"cwt_{name}_phase.csv", np.angle(w.coefficients), "time", x.times,
                             grid.k_values, {**metadata, "quantity": "arg W (rad)"})
        else:
            write_matrix_csv(out / f"cwt_{name}.csv", w.coefficients.real, "time", x.times,
                             grid.k_values, {**metadata, "quantity": "W"})
        write_csv_table(out / f"coi_{name}.csv", _coi_columns(w), basis.describe())

        if config.svg:
            render_heatmap(
                out / f"cwt_{name}.svg", np.abs(w.coefficients), x.times, grid.inverse_widths, w.coi_mask,
                title=f"{x.label}: |W| ({name})", colorbar_label=f"|W| [{x.units}]" if x.units else "|W|",
                log_scale=config.svg_scale == "log",
            )
        if config.normalise_max:
            write_matrix_csv(out / f"cwt_{name}_normalised.csv", wavelet_service.normalised_magnitude(w), "time",
                             x.times, grid.k_values, {**metadata, "quantity": "|W| / max |W|"})
        summary[name] = {"coi_inside_fraction": float(w.coi_mask.mean())}
        if config.widths:
            summary[name]["selected"] = _write_selected_widths(config, wavelet_service, x, basis, out)
    return summary


def _write_selected_widths(
    config: RunConfig,
    wavelet_service: WaveletService,
    x: TimeSeries,
    basis: WaveletBasis,
    out: Path,
) -> List[Dict[str, Any]]:
    """W(., k) at each requested width next to the Fourier component at its pseudo-frequency"""
    largest = ScaleGrid.largest_k(x.n)
    too_wide = [k for k in config.widths if k > largest]
    if too_wide:
        raise ConfigValidationError(
            f"widths {too_wide} exceed the largest width {largest} for {x.n} samples", {"widths": config.widths}
        )
    selected = ScaleGrid(k_values=config.widths, dt=x.dt)
    w = wavelet_service.cwt(x, basis, selected)
    frequencies = WaveletService.pseudo_frequencies(basis, selected)

    columns: Dict[str, Any] = {"time": x.times, x.label: x.values}
    entries = []
    for j, k in enumerate(selected.k_values):
        column = w.coefficients[:, j]
        if basis.is_complex:
            columns[f"w_k{k}_real"] = column.real
            columns[f"w_k{k}_magnitude"] = np.abs(column)
        else:
            columns[f"w_k{k}"] = column.real
        component, bin_frequency = SpectralService.fourier_component(x, float(frequencies[j]))
        columns[f"fourier_k{k}"] = component
        entries.append({"k": int(k), "pseudo_frequency_hz": float(frequencies[j]), "bin_frequency_hz": bin_frequency})

    write_csv_table(out / f"cwt_{basis.kind.value}_selected.csv", columns, {**basis.describe(), "widths": entries})
    return entries


def cmd_spectrum(config: RunConfig) -> Dict[str, Any]:
    """Welch PSD and wavelet spectrum of one series, side by side"""
    _require_inputs(config, 1, 1)
    x = _load(config)[0]
    wavelet_service = WaveletService(workers=config.workers)
    spectral = SpectralService(config.welch_segments, config.welch_overlap, config.window)
    out = _output_dir(config)

    periodogram = spectral.periodogram(x)
    welch = spectral.welch_psd(x)
    write_csv_table(out / "periodogram.csv", {"frequency_hz": periodogram.frequencies, "psd": periodogram.values},
                    periodogram.metadata())
    write_csv_table(out / "welch_psd.csv", {"frequency_hz": welch.frequencies, "psd": welch.values},
                    welch.metadata())

    summary: Dict[str, Any] = {
        "label": x.label,
        "welch_slope": SpectralService.loglog_slope(welch.frequencies, welch.values),
        "periodogram_power": periodogram.integrated_power(),
    }
    curves = [(welch.frequencies, welch.values, "Welch PSD")]
    grid = _grid(config, wavelet_service, x.n, x.dt)
    for basis in config.bases():
        name = basis.kind.value
        spectrum = wavelet_service.wavelet_spectrum(wavelet_service.cwt(x, basis, grid), coi_only=config.coi_only)
        frequencies = WaveletService.pseudo_frequencies(basis, ScaleGrid(k_values=spectrum.k_values, dt=x.dt))
        write_csv_table(out / f"wavelet_spectrum_{name}.csv",
                        {**_spectrum_columns(spectrum), "pseudo_frequency_hz": frequencies},
                        {**basis.describe(), "coi_only": config.coi_only, "dropped_k": spectrum.dropped_k})
        curves.append((frequencies, spectrum.sigma4, f"sigma^4 ({name})"))
        try:
            summary[f"{name}_sigma2_slope"] = spectrum.loglog_slope()
        except ValueError:
            summary[f"{name}_sigma2_slope"] = None

    if config.svg:
        render_spectra(out / "spectrum.svg", curves, title=f"{x.label}: PSD and wavelet spectrum",
                       xlabel="frequency [Hz] (wavelet widths at their pseudo-frequency)", ylabel="power")
    return summary


def cmd_coherence(config: RunConfig) -> Dict[str, Any]:
    """Fourier coherence and Morlet wavelet coherence of two series"""
    _require_inputs(config, 2, 2)
    series_set = _load_aligned(config)
    x, y = series_set[0], series_set[1]
    wavelet_service = WaveletService(workers=config.workers)
    spectral = SpectralService(config.welch_segments, config.welch_overlap, config.window)
    correlation = CorrelationService(wavelet_service)
    out = _output_dir(config)

    coherence = spectral.fourier_coherence(x, y)
    cross = spectral.cross_psd(x, y)
    ratio = spectral.normalised_cross_psd(x, y)
    write_csv_table(
        out / "fourier_coherence.csv",
        {
            "frequency_hz": coherence.frequencies,
            "coherence": coherence.values,
            "cross_psd_real": cross.values.real,
            "cross_psd_imag": cross.values.imag,
            "cross_psd_magnitude": np.abs(cross.values),
            "cross_psd_phase": np.angle(cross.values),
            "normalised_cross_psd": ratio.values,
        },
        {"labels": [x.label, y.label], **cross.metadata()},
    )
    for series in (x, y):
        auto = spectral.welch_psd(series)
        write_csv_table(out / f"welch_psd_{series.label}.csv", {"frequency_hz": auto.frequencies, "psd": auto.values},
                        {"label": series.label, **auto.metadata()})

    morlet = config.wavelet_basis(BasisKind.MORLET)
    grid = _grid(config, wavelet_service, x.n, x.dt)
    coherence_map = correlation.wavelet_coherence(x, y, grid, morlet)
    write_matrix_csv(out / "wavelet_coherence.csv", coherence_map.values, "time", x.times, grid.k_values,
                     {**coherence_map.metadata(), **morlet.describe()})
    if config.svg:
        render_heatmap(
            out / "wavelet_coherence.svg", coherence_map.values, x.times, grid.inverse_widths,
            coherence_map.coi_mask, title=f"Wavelet coherence {x.label} / {y.label}",
            colorbar_label="coherence^2", log_scale=config.svg_scale == "log",
        )

    inside = coherence_map.interior_values()
    defined = coherence.values[coherence.defined]
    return {
        "labels": [x.label, y.label],
        "fourier_median": float(np.median(defined)) if defined.size else None,
        "wavelet_median_inside_coi": float(np.median(inside)) if inside.size else None,
        "dropped_samples": series_set.dropped,
    }


def cmd_correlate(config: RunConfig) -> Dict[str, Any]:
    """All-pairs scalewise r2 grid"""
    _require_inputs(config, 2)
    series_set = _load_aligned(config)
    wavelet_service = WaveletService(workers=config.workers)
    correlation = CorrelationService(wavelet_service)
    out = _output_dir(config)

    grid = _grid(config, wavelet_service, series_set.n, series_set.dt)
    result = correlation.correlation_grid(
        series_set, config.bases(), grid, apply_cutoff=config.cutoff,
        component=config.pearson_component, coi_only=config.coi_only,
    )
    write_rows(
        out / "correlation_grid.csv", result.rows(),
        metadata={"labels": result.labels, "coi_only": config.coi_only, "cutoff": config.cutoff,
                  "pearson_component": config.pearson_component.value},
        columns=["var_a", "var_b", "basis", "inv_lambda", "r", "r2", "n_used", "coi_fraction"],
    )

    if config.svg:
        for basis in config.bases():
            curves = [
                ([entry.inv_lambda for entry in pair.correlation.entries], pair.correlation.r2_values,
                 f"{pair.var_a} / {pair.var_b}")
                for pair in result.pairs if pair.correlation.basis == basis.kind and pair.correlation.entries
            ]
            render_spectra(out / f"correlation_{basis.kind.value}.svg", curves,
                           title=f"Scalewise r^2 ({basis.kind.value})", xlabel="1/lambda [1/s]",
                           ylabel="r^2", log_y=False)

    best = {}
    for pair in result.pairs:
        if pair.correlation.entries:
            entry = pair.correlation.best()
            best[f"{pair.var_a}/{pair.var_b}/{pair.correlation.basis.value}"] = {
                "inv_lambda": entry.inv_lambda, "r2": entry.r2,
            }
    return {"labels": result.labels, "pairs": len(result.pairs), "best": best,
            "dropped_samples": series_set.dropped}


def cmd_vartransform(config: RunConfig) -> Dict[str, Any]:
    """Variance transform of a predictor/response pair, or the peak-variance summary of a set"""
    _require_inputs(config, 2)
    series_set = _load_aligned(config)
    wavelet_service = WaveletService(workers=config.workers)
    variance = VarianceService(wavelet_service)
    basis = config.wavelet_basis()
    out = _output_dir(config)
    grid = _grid(config, wavelet_service, series_set.n, series_set.dt)

    summary: Dict[str, Any] = {"labels": series_set.labels, "basis": basis.kind.value,
                               "dropped_samples": series_set.dropped}
    if len(series_set) == 2:
        x, y = series_set[0], series_set[1]
        result = variance.variance_transform(
            x, y, basis, grid, apply_cutoff=config.cutoff,
            unit_variance=config.unit_variance, component=config.pearson_component,
        )
        used = result.covariances.scale_grid
        _timeseries_service(config).write_csv(result.x_prime, out / f"{result.x_prime.label}.csv", config.time_column)
        write_csv_table(
            out / "covariance.csv",
            {
                "k": used.k_values,
                "inv_lambda": used.inverse_widths,
                "c_real": result.covariances.values.real,
                "c_imag": result.covariances.values.imag,
                "contribution": result.contributions,
            },
            {**basis.describe(), "predictor": x.label, "response": y.label},
        )
        for stage, spectrum in (("before", result.variance_spectrum_before),
                                ("after", result.variance_spectrum_after)):
            write_csv_table(out / f"variance_spectrum_{stage}.csv", _spectrum_columns(spectrum), basis.describe())
        if config.svg:
            render_spectra(
                out / "variance_spectra.svg",
                [(result.variance_spectrum_before.inverse_widths, result.variance_spectrum_before.normalised(),
                  f"{x.label}"),
                 (result.variance_spectrum_after.inverse_widths, result.variance_spectrum_after.normalised(),
                  f"{result.x_prime.label}")],
                title=f"Normalised variance, {x.label} toward {y.label}",
                xlabel="1/lambda [1/s]", ylabel="normalised sigma^2",
            )
        summary["transform"] = result.summary()

    peaks = variance.peak_variance_summary(series_set, basis, grid, apply_cutoff=config.cutoff,
                                           component=config.pearson_component)
    write_rows(out / "peak_variance.csv", [row.model_dump() for row in peaks.rows],
               metadata={**basis.describe(), "labels": peaks.labels},
               columns=["predictor", "response", "peak_inv_lambda", "peak_k", "r2_at_peak"])
    summary["peak_rows"] = len(peaks.rows)
    return summary


COMMANDS: Dict[str, Callable[[RunConfig], Dict[str, Any]]] = {
    "synth": cmd_synth,
    "cwt": cmd_cwt,
    "spectrum": cmd_spectrum,
    "coherence": cmd_coherence,
    "correlate": cmd_correlate,
    "vartransform": cmd_vartransform,
}
