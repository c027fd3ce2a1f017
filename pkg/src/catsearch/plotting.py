"""Figures for evaluation reports."""

from __future__ import annotations

from pathlib import Path

import numpy as np
from matplotlib.backends.backend_agg import FigureCanvasAgg
from matplotlib.figure import Figure

from .evaluate import ComparisonReport

BEFORE_COLOR = "#9e9e9e"
AFTER_COLOR = "#1f77b4"


def comparison_figure(report: ComparisonReport) -> Figure:
    """Per-query precision and retrieved counts, unfiltered vs filtered."""
    rows = [r for r in report.rows if r.error is None]
    labels = [r.query_id for r in rows]
    x = np.arange(len(rows))
    width = 0.38

    fig = Figure(figsize=(max(6.0, 0.7 * len(rows) + 2), 6.5))
    FigureCanvasAgg(fig)
    ax_p, ax_n = fig.subplots(2, 1, sharex=True)

    pb = [float(r.before.precision.value) for r in rows]
    pa = [float(r.after.precision.value) for r in rows]
    ax_p.bar(x - width / 2, pb, width, color=BEFORE_COLOR, label="without category")
    ax_p.bar(x + width / 2, pa, width, color=AFTER_COLOR, label="with category")
    ax_p.set_yscale("log")
    ax_p.set_ylim(top=1.5)
    ax_p.set_ylabel("precision")
    ax_p.legend(loc="lower left", bbox_to_anchor=(0.0, 1.0), ncol=2,
                fontsize="small", frameon=False)
    title = f"routing: {report.routing}"
    if report.classifier:
        title += f" ({report.classifier})"
    ax_p.set_title(title, fontsize="medium", loc="right")

    nb = [r.before.retrieved for r in rows]
    na = [r.after.retrieved for r in rows]
    ax_n.bar(x - width / 2, nb, width, color=BEFORE_COLOR)
    ax_n.bar(x + width / 2, na, width, color=AFTER_COLOR)
    ax_n.set_ylabel("documents retrieved")
    ax_n.set_xticks(x)
    ax_n.set_xticklabels(labels, rotation=45, ha="right")

    for ax in (ax_p, ax_n):
        ax.spines["top"].set_visible(False)
        ax.spines["right"].set_visible(False)
    fig.tight_layout()
    return fig


def save_comparison_figure(report: ComparisonReport, path) -> Path:
    path = Path(path)
    fig = comparison_figure(report)
    # no timestamp metadata, so reruns produce identical files
    fig.savefig(path, dpi=120, metadata={"Software": None} if path.suffix == ".png" else None)
    return path
