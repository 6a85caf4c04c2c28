"""Figures for barcodes, signatures and evaluation reports.

Uses ``matplotlib.figure.Figure`` directly so no GUI backend or global
pyplot state is involved.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np
from matplotlib.figure import Figure

from .filtration import PLANE_IDS

DIM_COLORS = {0: "tab:red", 1: "tab:blue"}


def _save(fig: Figure, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, dpi=120, bbox_inches="tight", metadata={"Software": None} if path.suffix == ".png" else None)
    return path


def plot_barcode(B, path, title: str | None = None) -> Path:
    """Horizontal bars, dim 0 in red and dim 1 in blue; infinite bars end at ``k``."""
    bars = B.bars()
    fig = Figure(figsize=(6, max(2.0, 0.12 * len(bars) + 1)))
    ax = fig.add_subplot()
    k = B.k if B.k > 0 else 1.0
    for i, bar in enumerate(bars):
        end = k * 1.05 if np.isinf(bar.death) else bar.death
        ax.plot([bar.birth, end], [i, i], color=DIM_COLORS.get(bar.dim, "gray"), lw=2)
        if np.isinf(bar.death):
            ax.plot(end, i, marker=">", color=DIM_COLORS.get(bar.dim, "gray"), ms=4)
    ax.axvline(k, color="0.6", ls=":", lw=1)
    ax.set_yticks([])
    ax.set_xlabel(f"distance to plane {B.plane or ''}".strip())
    ax.set_title(title or f"barcode {B.plane or ''}".strip())
    return _save(fig, path)


def plot_diagram(B, dim: int, path) -> Path:
    D = B.diagram(dim, finite=True)
    fig = Figure(figsize=(4, 4))
    ax = fig.add_subplot()
    hi = max(B.k, float(D.max()) if len(D) else 0.0, 1e-9) * 1.05
    ax.plot([0, hi], [0, hi], color="0.5", lw=1)
    ax.scatter(D[:, 0], D[:, 1], s=10, color=DIM_COLORS.get(dim, "gray"))
    ax.set_xlim(0, hi)
    ax.set_ylim(0, hi)
    ax.set_xlabel("birth")
    ax.set_ylabel("death")
    ax.set_title(f"{dim}-persistence diagram {B.plane or ''}".strip())
    return _save(fig, path)


def plot_signature(sig, path) -> Path:
    M = sig.matrix().astype(float)
    fig = Figure(figsize=(8, 4))
    ax = fig.add_subplot()
    im = ax.imshow(M, aspect="auto", cmap="viridis", interpolation="nearest")
    ax.set_yticks(range(16))
    ax.set_yticklabels([f"{p} d{d}" for p in PLANE_IDS for d in (0, 1)], fontsize=7)
    ax.set_xlabel("entry")
    fig.colorbar(im, ax=ax)
    return _save(fig, path)


def plot_tp_tn(report, path) -> Path:
    pts = np.array(report.curve, float).reshape(-1, 3)
    fig = Figure(figsize=(5, 4))
    ax = fig.add_subplot()
    if len(pts):
        ax.step(pts[:, 0], pts[:, 1], where="post", color="tab:red", label="TP")
        ax.step(pts[:, 0], pts[:, 2], where="post", color="tab:blue", label="TN")
    ax.set_xlabel("threshold (total angle, degrees)")
    ax.set_ylabel("% of values below threshold")
    ax.set_ylim(0, 102)
    ax.legend(loc="lower right")
    return _save(fig, path)


def plot_confusion(report, path) -> Path:
    C = np.asarray(report.confusion, float)
    n = len(report.labels)
    fig = Figure(figsize=(1.2 + 0.6 * n, 1 + 0.6 * n))
    ax = fig.add_subplot()
    ax.imshow(C, vmin=0, vmax=100, cmap="Blues")
    ax.set_xticks(range(n))
    ax.set_yticks(range(n))
    ax.set_xticklabels(report.labels, rotation=90)
    ax.set_yticklabels(report.labels)
    if n <= 20:
        for i in range(n):
            for j in range(n):
                ax.text(j, i, f"{C[i, j]:.0f}", ha="center", va="center",
                        color="white" if C[i, j] > 50 else "black", fontsize=8)
    ax.set_xlabel("predicted")
    ax.set_ylabel("true")
    return _save(fig, path)


def plot_rank_accuracy(report, path) -> Path:
    ranks = sorted(report.rank_accuracy)
    fig = Figure(figsize=(5, 3.5))
    ax = fig.add_subplot()
    ax.plot(ranks, [report.rank_accuracy[r] for r in ranks], marker="o")
    ax.set_xlabel("rank")
    ax.set_ylabel("accuracy (%)")
    ax.set_ylim(0, 102)
    return _save(fig, path)


def report_figures(report, directory) -> list[Path]:
    d = Path(directory)
    return [plot_tp_tn(report, d / "tp_tn_curves.png"),
            plot_confusion(report, d / "confusion.png"),
            plot_rank_accuracy(report, d / "rank_accuracy.png")]
