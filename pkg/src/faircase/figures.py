"""Matplotlib figure output for metric summaries and evaluation status.

Figures are written straight to files next to the textual reports; no
interactive backend is ever required.
"""

from __future__ import annotations

from pathlib import Path
from typing import Mapping

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .binder import CaseEvaluation, Timeline
from .case import AssuranceCase, ElementStatus
from .metrics import ConfusionCounts, group_rates

_STATUS_COLORS = {
    ElementStatus.SUPPORTED: "#15803d",
    ElementStatus.UNSUPPORTED: "#a16207",
    ElementStatus.FAILING: "#b91c1c",
    ElementStatus.STALE: "#4338ca",
    ElementStatus.NOT_EVALUATED: "#6b7280",
}

_RATE_FIELDS = ("selection_rate", "tpr", "fpr", "precision", "accuracy", "f1")


def _new_axes(width: float = 8.0, height: float = 4.5):
    fig, ax = plt.subplots(figsize=(width, height))
    ax.grid(True, axis="y", alpha=0.3)
    return fig, ax


def save_group_rates_figure(
    counts_by_group: Mapping[str, ConfusionCounts],
    out_path: str | Path,
    title: str = "Per-group rates",
) -> Path:
    """Grouped bar chart of the derived rates for each sensitive group."""
    groups = sorted(counts_by_group)
    fig, ax = _new_axes()
    width = 0.8 / max(len(groups), 1)
    for gi, group in enumerate(groups):
        rates = group_rates(counts_by_group[group])
        xs, ys = [], []
        for fi, name in enumerate(_RATE_FIELDS):
            value = getattr(rates, name)
            if value is None:
                continue
            xs.append(fi + gi * width)
            ys.append(value)
        ax.bar(xs, ys, width=width, label=group)
    ax.set_xticks([i + 0.4 - width / 2 for i in range(len(_RATE_FIELDS))])
    ax.set_xticklabels(_RATE_FIELDS, rotation=20)
    ax.set_ylim(0, 1.05)
    ax.set_ylabel("rate")
    ax.set_title(title)
    ax.legend()
    out_path = Path(out_path)
    fig.tight_layout()
    fig.savefig(out_path, dpi=120)
    plt.close(fig)
    return out_path


def save_status_figure(
    case: AssuranceCase, evaluation: CaseEvaluation, out_path: str | Path
) -> Path:
    """One horizontal bar per element, colored by roll-up status."""
    ids = sorted(evaluation.rollup.statuses, reverse=True)
    statuses = [evaluation.rollup.statuses[eid] for eid in ids]
    fig, ax = _new_axes(height=max(2.0, 0.4 * len(ids) + 1.2))
    ax.barh(
        range(len(ids)),
        [1] * len(ids),
        color=[_STATUS_COLORS[s] for s in statuses],
        edgecolor="white",
    )
    ax.set_yticks(range(len(ids)))
    ax.set_yticklabels([f"{eid} ({case.elements[eid].kind.value})" for eid in ids])
    ax.set_xticks([])
    for i, status in enumerate(statuses):
        ax.text(0.02, i, status.value.upper(), va="center", color="white", fontweight="bold")
    ax.set_title(f"Case {case.case_id}: element status")
    out_path = Path(out_path)
    fig.tight_layout()
    fig.savefig(out_path, dpi=120)
    plt.close(fig)
    return out_path


def save_timeline_figure(case: AssuranceCase, timeline: Timeline, out_path: str | Path) -> Path:
    """Share of supported elements over time, with the goal status marked."""
    times = [entry.at for entry in timeline.entries]
    fractions = []
    goal_colors = []
    for entry in timeline.entries:
        statuses = entry.evaluation.rollup.statuses
        supported = sum(1 for s in statuses.values() if s is ElementStatus.SUPPORTED)
        fractions.append(supported / len(statuses) if statuses else 0.0)
        goal = statuses.get(case.root, ElementStatus.NOT_EVALUATED)
        goal_colors.append(_STATUS_COLORS[goal])
    fig, ax = _new_axes()
    ax.plot(times, fractions, color="#374151", linewidth=1.5, zorder=1)
    ax.scatter(times, fractions, c=goal_colors, s=60, zorder=2)
    ax.set_ylim(0, 1.05)
    ax.set_ylabel("fraction of elements supported")
    ax.set_title(f"Case {case.case_id}: status over time (marker = goal status)")
    fig.autofmt_xdate()
    out_path = Path(out_path)
    fig.tight_layout()
    fig.savefig(out_path, dpi=120)
    plt.close(fig)
    return out_path
