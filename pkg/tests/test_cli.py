# tests/test_cli.py
"""
End-to-end runs of the command-line front end
"""
import json
import shutil

import numpy as np
import pytest

from wavenoise.main import run
from wavenoise.services.synth_service import EIGHT_SERIES_LABELS
from wavenoise.utils.file_handler import read_csv_metadata, read_json, read_table


@pytest.fixture
def eight_series(tmp_path):
    """Eight synthetic CSVs written by the synth command"""
    out = tmp_path / "synth"
    assert run(["synth", "--preset", "eight_series", "--n", "2048", "--seed", "3", "--out", str(out)]) == 0
    return out


def _last_error(capsys) -> dict:
    return json.loads(capsys.readouterr().err.strip().splitlines()[-1])


def test_synth_writes_one_csv_per_series(eight_series):
    for label in EIGHT_SERIES_LABELS:
        table = read_table(eight_series / f"{label}.csv")
        assert list(table.columns) == ["time", label]
        assert len(table) == 2048
    assert read_json(eight_series / "recipe.json")["seed"] == 3
    assert read_json(eight_series / "resolved_config.json")["preset"] == "eight_series"
    assert len(read_json(eight_series / "summary.json")["files"]) == 8


def test_invalid_max_k_is_a_config_error(eight_series, tmp_path, capsys):
    code = run(["cwt", str(eight_series / "q1_rabi.csv"), "--max-k", "7", "--out", str(tmp_path / "cwt")])
    assert code == 3
    error = _last_error(capsys)
    assert error["error"] == "config_invalid"
    assert error["details"]["errors"][0]["loc"] == "max_k"


def test_missing_input_file(tmp_path, capsys):
    code = run(["cwt", str(tmp_path / "absent.csv"), "--out", str(tmp_path / "cwt")])
    assert code == 10
    assert _last_error(capsys)["error"] == "input_missing"


def test_cwt_outputs(eight_series, tmp_path):
    out = tmp_path / "cwt"
    assert run(["cwt", str(eight_series / "q1_larmor.csv"), "--both-bases", "--max-k", "64", "--out", str(out)]) == 0
    haar = read_table(out / "cwt_haar.csv")
    assert len(haar) == 2048
    assert haar.columns[0] == "time"
    assert (out / "cwt_morlet_magnitude.csv").is_file()
    assert (out / "cwt_morlet_phase.csv").is_file()
    assert read_csv_metadata(out / "coi_morlet.csv")["basis"] == "morlet"
    assert read_json(out / "cwt_haar.json")["source_label"] == "q1_larmor"


def test_cwt_takes_exactly_one_input(eight_series, tmp_path, capsys):
    code = run(["cwt", str(eight_series / "q1_rabi.csv"), str(eight_series / "q2_rabi.csv"),
                "--out", str(tmp_path / "cwt")])
    assert code == 3
    assert _last_error(capsys)["error"] == "config_invalid"


def test_spectrum_with_figures(eight_series, tmp_path):
    out = tmp_path / "spectrum"
    assert run(["spectrum", str(eight_series / "q1_rabi.csv"), "--svg", "--out", str(out)]) == 0
    welch = read_table(out / "welch_psd.csv")
    assert np.all(welch["frequency_hz"] > 0)
    assert (out / "wavelet_spectrum_haar.csv").is_file()
    assert "<svg" in (out / "spectrum.svg").read_text(encoding="utf-8")
    summary = read_json(out / "summary.json")
    assert summary["welch_slope"] < 0


def test_coherence_of_a_series_with_its_copy(eight_series, tmp_path):
    copy = tmp_path / "copy.csv"
    shutil.copy(eight_series / "q1_rabi.csv", copy)
    out = tmp_path / "coherence"
    assert run(["coherence", str(eight_series / "q1_rabi.csv"), str(copy), "--max-k", "128", "--out", str(out)]) == 0
    table = read_table(out / "fourier_coherence.csv")
    np.testing.assert_allclose(table["coherence"], 1.0, atol=1e-9)
    summary = read_json(out / "summary.json")
    assert summary["labels"] == ["q1_rabi", "copy"]
    assert summary["wavelet_median_inside_coi"] == pytest.approx(1.0, abs=1e-9)


def test_correlate_and_replay(eight_series, tmp_path):
    inputs = [str(eight_series / f"{label}.csv") for label in EIGHT_SERIES_LABELS]
    first, second = tmp_path / "first", tmp_path / "second"
    assert run(["correlate", *inputs, "--out", str(first)]) == 0
    assert read_json(first / "summary.json")["pairs"] == 28

    table = read_table(first / "correlation_grid.csv")
    assert set(table["basis"]) == {"haar"}
    assert table["r2"].between(0.0, 1.0).all()

    assert run(["correlate", "--config", str(first / "resolved_config.json"), "--out", str(second)]) == 0
    assert (first / "correlation_grid.csv").read_bytes() == (second / "correlation_grid.csv").read_bytes()


def test_vartransform_pair(eight_series, tmp_path):
    out = tmp_path / "vartransform"
    code = run(["vartransform", str(eight_series / "q1_larmor.csv"), str(eight_series / "q2_larmor.csv"),
                "--basis", "morlet", "--svg", "--out", str(out)])
    assert code == 0
    prime = read_table(out / "q1_larmor_prime.csv")
    assert len(prime) == 2048
    covariance = read_table(out / "covariance.csv")
    assert list(covariance.columns) == ["k", "inv_lambda", "c_real", "c_imag", "contribution"]
    assert len(read_table(out / "peak_variance.csv")) == 2
    assert (out / "variance_spectra.svg").is_file()
    assert read_json(out / "summary.json")["transform"]["response"] == "q2_larmor"


def test_normalization_alias_maps_to_literal(eight_series, tmp_path):
    out = tmp_path / "cwt"
    assert run(["cwt", str(eight_series / "q1_rabi.csv"), "--normalization", "paper", "--max-k", "32",
                "--out", str(out)]) == 0
    assert read_json(out / "resolved_config.json")["normalization"] == "literal"
    assert read_json(out / "cwt_haar.json")["normalization"] == "literal"


@pytest.mark.parametrize("flags", [["--basis", "daub"], ["--max-k", "abc"], ["--window", "flat"]])
def test_unparseable_flags_are_config_errors(eight_series, tmp_path, capsys, flags):
    code = run(["cwt", str(eight_series / "q1_rabi.csv"), *flags, "--out", str(tmp_path / "cwt")])
    assert code == 3
    error = _last_error(capsys)
    assert error["error"] == "config_invalid"
    assert error["exit_code"] == 3
    assert "usage" in error["details"]


def test_coherence_checks_epsilon_with_the_default_basis(eight_series, tmp_path, capsys):
    code = run(["coherence", str(eight_series / "q1_rabi.csv"), str(eight_series / "q2_rabi.csv"),
                "--epsilon", "3", "--out", str(tmp_path / "coherence")])
    assert code == 3
    error = _last_error(capsys)
    assert error["error"] == "config_invalid"
    assert error["details"]["errors"][0]["msg"].endswith("epsilon must be at least 5.0")


def test_coherence_exports(eight_series, tmp_path):
    copy = tmp_path / "copy.csv"
    shutil.copy(eight_series / "q1_rabi.csv", copy)
    out = tmp_path / "coherence"
    assert run(["coherence", str(eight_series / "q1_rabi.csv"), str(copy), "--max-k", "64", "--out", str(out)]) == 0

    wavelet = read_table(out / "wavelet_coherence.csv").drop(columns=["time"]).to_numpy()
    assert wavelet.shape[0] == 2048
    np.testing.assert_allclose(wavelet, 1.0, atol=1e-9)

    table = read_table(out / "fourier_coherence.csv")
    assert {"cross_psd_real", "cross_psd_imag", "cross_psd_magnitude", "cross_psd_phase"} <= set(table.columns)
    np.testing.assert_allclose(
        table["cross_psd_magnitude"], np.hypot(table["cross_psd_real"], table["cross_psd_imag"]), rtol=1e-12
    )
    np.testing.assert_allclose(table["cross_psd_phase"], 0.0, atol=1e-9)

    for label in ("q1_rabi", "copy"):
        auto = read_table(out / f"welch_psd_{label}.csv")
        np.testing.assert_allclose(auto["frequency_hz"], table["frequency_hz"])
        np.testing.assert_allclose(auto["psd"], table["cross_psd_real"], rtol=1e-9)


def test_spectrum_reports_pseudo_frequencies(eight_series, tmp_path):
    out = tmp_path / "spectrum"
    assert run(["spectrum", str(eight_series / "q1_rabi.csv"), "--both-bases", "--out", str(out)]) == 0
    haar = read_table(out / "wavelet_spectrum_haar.csv")
    np.testing.assert_allclose(haar["pseudo_frequency_hz"], haar["inv_lambda"], rtol=1e-12)
    morlet = read_table(out / "wavelet_spectrum_morlet.csv")
    np.testing.assert_allclose(morlet["pseudo_frequency_hz"], 5.0 / (2 * np.pi * morlet["k"]), rtol=1e-12)


def test_cwt_selected_widths_and_normalised_map(eight_series, tmp_path):
    out = tmp_path / "cwt"
    assert run(["cwt", str(eight_series / "q1_larmor.csv"), "--widths", "32", "8", "--normalise-max",
                "--both-bases", "--max-k", "64", "--out", str(out)]) == 0

    haar = read_table(out / "cwt_haar_selected.csv")
    assert list(haar.columns) == ["time", "q1_larmor", "w_k8", "fourier_k8", "w_k32", "fourier_k32"]
    full = read_table(out / "cwt_haar.csv")
    np.testing.assert_allclose(haar["w_k8"], full["k=8"], rtol=1e-12, atol=1e-12)
    entries = read_csv_metadata(out / "cwt_haar_selected.csv")["widths"]
    assert [entry["k"] for entry in entries] == [8, 32]
    assert entries[0]["pseudo_frequency_hz"] == pytest.approx(1.0 / 8.0)

    morlet = read_table(out / "cwt_morlet_selected.csv")
    assert {"w_k8_real", "w_k8_magnitude", "fourier_k32"} <= set(morlet.columns)
    assert np.all(morlet["w_k32_magnitude"] >= 0.0)

    for name in ("haar", "morlet"):
        normalised = read_table(out / f"cwt_{name}_normalised.csv").drop(columns=["time"]).to_numpy()
        assert normalised.max() == pytest.approx(1.0)
        assert normalised.min() >= 0.0
    assert read_json(out / "summary.json")["haar"]["selected"][1]["k"] == 32


def test_resolved_config_records_settings(eight_series, tmp_path):
    first, second = tmp_path / "first", tmp_path / "second"
    assert run(["cwt", str(eight_series / "q1_rabi.csv"), "--max-k", "32", "--out", str(first)]) == 0
    recorded = read_json(first / "resolved_config.json")
    assert recorded["settings"]["MORLET_TRUNCATION"] == 4
    assert recorded["settings"]["TIME_SMOOTHING_FACTOR"] == 1.0

    assert run(["cwt", "--config", str(first / "resolved_config.json"), "--out", str(second)]) == 0
    assert (first / "cwt_haar.csv").read_bytes() == (second / "cwt_haar.csv").read_bytes()
