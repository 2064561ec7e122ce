"""Static vector-graphic emission for reports and augmentation galleries."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .core import LandmarkSequence
from .evaluation import EvalReport, mean_ci

__all__ = ["comparison_plot", "sweep_plot", "gallery_plot"]


def comparison_plot(report: EvalReport, path: str | Path) -> None:
    """Bar chart of per-method mean test accuracy with CI whiskers."""
    summary = report.method_summary()
    order = [n for n in ("baseline", "generalist", "bagging") if n in summary]
    order += sorted(n for n in summary if n.startswith("specialist:"))
    if "specialist-ensemble" in summary:
        order.append("specialist-ensemble")
    means = [summary[n].mean for n in order]
    errs = [summary[n].half_width if summary[n].defined else 0.0 for n in order]
    labels = [n.replace("specialist:", "") for n in order]
    fig, ax = plt.subplots(figsize=(max(6, 0.8 * len(order)), 4))
    x = np.arange(len(order))
    colors = ["#4c72b0" if not n.startswith("specialist:") else "#9ecae1" for n in order]
    if "specialist-ensemble" in order:
        colors[order.index("specialist-ensemble")] = "#dd8452"
    ax.bar(x, means, yerr=errs, capsize=3, color=colors)
    ax.set_xticks(x)
    ax.set_xticklabels(labels, rotation=45, ha="right", fontsize=8)
    ax.set_ylabel("test accuracy")
    ax.set_title(f"Method comparison (mean ± 95% CI over {report.runs} runs)")
    ax.set_ylim(0, 1.0)
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)


def sweep_plot(report: EvalReport, path: str | Path) -> None:
    """Accuracy vs ensemble size k, averaged over runs, with a CI band."""
    if not report.subset_curves:
        raise ValueError("report has no subset-sweep data")
    ks = [p.k for p in report.subset_curves[0]]
    per_run = np.array([[p.mean for p in curve] for curve in report.subset_curves])
    means = per_run.mean(axis=0)
    if per_run.shape[0] >= 2:
        halves = np.array([mean_ci(per_run[:, i]).half_width for i in range(per_run.shape[1])])
    else:
        halves = np.array([p.half_width if p.defined else 0.0 for p in report.subset_curves[0]])
    fig, ax = plt.subplots(figsize=(5, 3.5))
    ax.plot(ks, means, marker="o", color="#4c72b0")
    ax.fill_between(ks, means - halves, means + halves, alpha=0.25, color="#4c72b0")
    ax.set_xlabel("ensemble size k")
    ax.set_ylabel("mean accuracy over size-k subsets")
    ax.set_title("Accuracy vs ensemble size (mean ± 95% CI)")
    ax.set_xticks(ks)
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)


def gallery_plot(
    before: LandmarkSequence,
    after: LandmarkSequence,
    title: str,
    path: str | Path,
    joints: list[int] | None = None,
) -> None:
    """Before/after x(t), y(t), z(t) trajectories for a few joints."""
    if joints is None:
        joints = sorted(set([0, before.J // 2, before.J - 1]))
    fig, axes = plt.subplots(1, 3, figsize=(10, 3), sharex=True)
    names = "xyz"
    t = np.arange(before.T)
    for axis in range(3):
        ax = axes[axis]
        for j in joints:
            ax.plot(t, before.frames[:, j, axis], color="#888888", lw=1.0,
                    label="before" if (axis == 0 and j == joints[0]) else None)
            ax.plot(t, after.frames[:, j, axis], color="#dd8452", lw=1.0,
                    label="after" if (axis == 0 and j == joints[0]) else None)
        ax.set_title(f"{names[axis]}(t)")
        ax.set_xlabel("frame")
    axes[0].legend(fontsize=8)
    fig.suptitle(title)
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
