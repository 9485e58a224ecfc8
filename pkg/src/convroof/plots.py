"""Figure rendering for sweep reports.

Sweeps always write a delimited table; these helpers render a quick-look
matplotlib figure next to it.  Figures are a convenience view of the table,
never the primary output.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

__all__ = ["plot_sweep_curves", "plot_plane_heatmap"]


def plot_sweep_curves(series, xlabel, ylabel, out_path, oracle_series=None):
    """Line plot of one or more sweep traces, with optional oracle dots.

    ``series`` maps a legend label to (x, y) arrays; ``oracle_series`` uses
    the same layout and is drawn as unconnected markers.
    """
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    for label, (xs, ys) in series.items():
        ax.plot(xs, ys, "-", lw=1.5, label=label)
    if oracle_series:
        for label, (xs, ys) in oracle_series.items():
            ax.plot(xs, ys, "o", ms=4, mfc="none", label=label)
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(out_path, dpi=150)
    plt.close(fig)


def plot_plane_heatmap(us, vs, values, xlabel, ylabel, title, out_path):
    """Heatmap of a 2-D sweep; NaN cells (outside the domain) stay blank."""
    fig, ax = plt.subplots(figsize=(5.0, 4.2))
    grid = np.asarray(values)
    mesh = ax.pcolormesh(us, vs, grid.T, shading="nearest", cmap="viridis")
    fig.colorbar(mesh, ax=ax)
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.set_title(title)
    ax.set_aspect("equal")
    fig.tight_layout()
    fig.savefig(out_path, dpi=150)
    plt.close(fig)
