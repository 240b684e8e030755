"""Static figures for CLI reports.

Figures are built on :class:`matplotlib.figure.Figure` directly, so no GUI
backend or global pyplot state is involved.
"""

from __future__ import annotations

import numpy as np
from matplotlib.figure import Figure


def _save(fig: Figure, path) -> None:
    fig.tight_layout()
    fig.savefig(path, dpi=120)


def plot_residual(report, path, title: str | None = None) -> None:
    """Relative residual ``|value| / scale`` against the grid, log scale."""
    fig = Figure(figsize=(6, 4))
    ax = fig.add_subplot()
    scale = report.scale if report.scale > 0 else 1.0
    rel = np.abs(report.values) / scale
    # zeros cannot go on a log axis; pin them to the machine floor
    rel = np.maximum(rel, np.finfo(float).tiny)
    ax.semilogy(report.grid, rel, ".-", lw=0.8, ms=3, label="|residual| / scale")
    ax.axhline(report.threshold, color="C3", ls="--", lw=1, label="threshold")
    for s in report.dropped:
        ax.axvline(s, color="0.7", lw=0.6)
    ax.set_xlabel("s")
    ax.set_ylabel("relative residual")
    ax.set_title(title or f"{report.label}: {report.verdict.value}")
    ax.legend(loc="best", fontsize=8)
    _save(fig, path)


def plot_slant(report, path, title: str | None = None) -> None:
    """Slant indicator samples with their mean."""
    fig = Figure(figsize=(6, 4))
    ax = fig.add_subplot()
    ax.plot(report.grid, report.values, ".-", lw=0.8, ms=3)
    if np.isfinite(report.mean):
        ax.axhline(report.mean, color="C3", ls="--", lw=1)
    ax.set_xlabel("s")
    ax.set_ylabel("sigma")
    verdict = "constant" if report.constant else "not constant"
    ax.set_title(title or f"slant indicator ({verdict}, std={report.std:.3g})")
    _save(fig, path)


def plot_curve(s, position, path, title: str | None = None) -> None:
    """Coordinate projections of a curve; ``position`` has shape (n, 3)."""
    position = np.asarray(position, dtype=float)
    fig = Figure(figsize=(10, 3.4))
    pairs = ((1, 2), (1, 0), (2, 0))
    for i, (a, b) in enumerate(pairs):
        ax = fig.add_subplot(1, 3, i + 1)
        ax.plot(position[:, a], position[:, b], lw=1)
        ax.plot(position[0, a], position[0, b], "o", ms=3, color="C2")
        ax.set_xlabel(f"x{a}")
        ax.set_ylabel(f"x{b}")
        ax.set_aspect("equal", adjustable="datalim")
    if title:
        fig.suptitle(title)
    _save(fig, path)
