"""Line plots of sweep results as SVG. Requires the `plot` extra (matplotlib)."""

from __future__ import annotations

from collections.abc import Sequence
from pathlib import Path

import pandas as pd

from mfpricing.exceptions import ExperimentConfigError

__all__ = ["write_line_plot"]


def _pyplot():
    try:
        import matplotlib
    except ImportError as e:
        msg = "SVG output needs matplotlib. Install it with `pip install 'mf-pricing[plot]'`."
        raise ExperimentConfigError(msg, extra_info={"key": "svg"}) from e
    matplotlib.use("Agg")
    # fixed ids so repeated runs produce identical files
    matplotlib.rcParams["svg.hashsalt"] = "mfpricing"
    import matplotlib.pyplot as plt

    return plt


def write_line_plot(
    path: Path | str,
    frame: pd.DataFrame,
    x: str,
    ys: Sequence[str],
    *,
    xlabel: str | None = None,
    ylabel: str = "",
    title: str = "",
    hlines: dict[str, float] | None = None,
) -> Path:
    """One polyline per column in `ys` against column `x`, plus optional
    horizontal reference lines keyed by legend label.
    """
    plt = _pyplot()
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig, ax = plt.subplots(figsize=(6, 4))
    try:
        for column in ys:
            ax.plot(frame[x], frame[column], marker=".", label=column)
        for label, value in (hlines or {}).items():
            ax.axhline(value, color="black", linewidth=1, label=label)
        ax.set_xlabel(xlabel or x)
        ax.set_ylabel(ylabel)
        if title:
            ax.set_title(title)
        ax.legend()
        fig.tight_layout()
        fig.savefig(path, format="svg", metadata={"Date": None})
    finally:
        plt.close(fig)
    return path
