"""Figure rendering for run artifacts (always to files, never interactive)."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .fields import AlgebraField

__all__ = ["save_profile_figure", "save_charges_figure", "save_series_figure"]


def save_profile_figure(f: AlgebraField, path, title: str = "") -> None:
    """All eight component curves of one snapshot."""
    fig, ax = plt.subplots(figsize=(7, 4))
    for m in range(f.values.shape[1]):
        ax.plot(f.grid.nodes, f.values[:, m], lw=1.2, label=f"u{m}")
    ax.set_xlabel("x")
    ax.set_ylabel("components")
    if title:
        ax.set_title(title)
    ax.legend(ncol=4, fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_charges_figure(table: np.ndarray, names: list[str], path) -> None:
    """Charge drift |Q(t) - Q(0)| on a log scale; table columns follow names."""
    t = table[:, 0]
    fig, ax = plt.subplots(figsize=(7, 4))
    for col in range(1, table.shape[1]):
        drift = np.abs(table[:, col] - table[0, col])
        ax.semilogy(t, np.maximum(drift, 1e-18), lw=1.0, label=names[col])
    ax.set_xlabel("t")
    ax.set_ylabel("|drift|")
    ax.legend(ncol=3, fontsize=7)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_series_figure(terms: list[AlgebraField], path) -> None:
    """Real part of each series coefficient field."""
    fig, ax = plt.subplots(figsize=(7, 4))
    for n, f in enumerate(terms):
        ax.plot(f.grid.nodes, f.values[:, 0], lw=1.0, label=f"r{n}")
    ax.set_xlabel("x")
    ax.set_ylabel("Re r_n")
    ax.legend(ncol=4, fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
