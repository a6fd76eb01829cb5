# wavenoise/utils/plotting.py
"""
Static SVG figures: time-scale heatmaps with the cone of influence hatched,
and log-log spectrum overlays
"""
import logging
from pathlib import Path
from typing import Optional, Sequence, Tuple, Union

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402
from matplotlib.colors import LogNorm, Normalize  # noqa: E402

from wavenoise.core.config import settings  # noqa: E402

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]


def render_heatmap(
    path: PathLike,
    values: np.ndarray,
    times: np.ndarray,
    inverse_widths: np.ndarray,
    coi_mask: Optional[np.ndarray] = None,
    title: str = "",
    colorbar_label: str = "",
    log_scale: bool = False,
) -> Path:
    """
    Heatmap of an N x |k| map against time and 1/lambda

    Args:
        path: Destination .svg
        values: Real map, rows are translations
        times: Time of each row in seconds
        inverse_widths: 1/lambda of each column
        coi_mask: True where coefficients are trustworthy; the rest is hatched
        title: Figure title
        colorbar_label: Colour axis label
        log_scale: Logarithmic colour scale

    Returns:
        Path written
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)

    stride = max(1, int(np.ceil(values.shape[0] / settings.SVG_MAX_COLUMNS)))
    shown = np.asarray(values)[::stride]
    shown_times = np.asarray(times)[::stride]

    if log_scale:
        positive = shown[shown > 0]
        floor = float(positive.min()) if positive.size else 1e-12
        norm = LogNorm(vmin=floor, vmax=max(float(shown.max()), floor * 10))
        shown = np.where(shown > 0, shown, floor)
    else:
        norm = Normalize(vmin=float(np.min(shown)), vmax=float(np.max(shown)))

    fig, ax = plt.subplots(figsize=(9, 4.5))
    mesh = ax.pcolormesh(shown_times, inverse_widths, shown.T, shading="nearest", norm=norm, cmap="viridis")
    if coi_mask is not None:
        outside = (~np.asarray(coi_mask)[::stride]).astype(float)
        ax.contourf(
            shown_times, inverse_widths, outside.T,
            levels=[0.5, 1.5], colors="none", hatches=["//"],
        )
    ax.set_yscale("log")
    ax.set_xlabel("time [s]")
    ax.set_ylabel("1/lambda [1/s]")
    ax.set_title(title)
    cbar = fig.colorbar(mesh, ax=ax, pad=0.02)
    cbar.set_label(colorbar_label)
    fig.tight_layout()
    fig.savefig(path, format="svg")
    plt.close(fig)
    logger.debug(f"Wrote heatmap {path}")
    return path


def render_spectra(
    path: PathLike,
    curves: Sequence[Tuple[np.ndarray, np.ndarray, str]],
    title: str = "",
    xlabel: str = "frequency [Hz]",
    ylabel: str = "",
    log_y: bool = True,
) -> Path:
    """Overlay of (x, y, label) curves on log axes"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)

    fig, ax = plt.subplots(figsize=(7, 4.5))
    for x, y, label in curves:
        x = np.asarray(x, dtype=np.float64)
        y = np.asarray(y, dtype=np.float64)
        keep = (x > 0) & np.isfinite(y)
        if log_y:
            keep &= y > 0
        ax.plot(x[keep], y[keep], linewidth=1.0, label=label)
    ax.set_xscale("log")
    if log_y:
        ax.set_yscale("log")
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.set_title(title)
    ax.legend(frameon=False)
    fig.tight_layout()
    fig.savefig(path, format="svg")
    plt.close(fig)
    logger.debug(f"Wrote spectrum plot {path}")
    return path
