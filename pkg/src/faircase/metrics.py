"""Per-group confusion counts, derived rates, and group-fairness notions.

All rates are plain fractions; a rate whose denominator is zero is returned
as ``None`` rather than 0 or NaN so that representation gaps stay visible.
Multi-group notions aggregate as max-minus-min spreads (min/max for the
ratio), giving a single gateable scalar per notion.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Sequence

from .errors import (
    MissingThresholdError,
    TooFewGroupsError,
    UndefinedRateError,
)


@dataclass(frozen=True)
class ConfusionCounts:
    """Binary confusion counts: true/false positives and negatives."""

    tps: int
    fps: int
    tns: int
    fns: int

    def __post_init__(self) -> None:
        for name in ("tps", "fps", "tns", "fns"):
            count = getattr(self, name)
            if isinstance(count, bool) or not isinstance(count, int) or count < 0:
                raise ValueError(f"{name} must be a non-negative integer, got {count!r}")

    @property
    def total(self) -> int:
        return self.tps + self.fps + self.tns + self.fns


@dataclass(frozen=True)
class GroupOutcome:
    """Confusion counts for one value of a sensitive attribute."""

    group_name: str
    counts: ConfusionCounts

    def __post_init__(self) -> None:
        if not self.group_name:
            raise ValueError("group_name must be non-empty")


@dataclass(frozen=True)
class RateBundle:
    """Standard rates derived from confusion counts; ``None`` when undefined."""

    selection_rate: float | None
    tpr: float | None
    fpr: float | None
    precision: float | None
    accuracy: float | None
    f1: float | None


@dataclass(frozen=True)
class PredictionRecord:
    """One labeled prediction with its sensitive-attribute group."""

    group: str
    y_true: int
    y_pred: int

    def __post_init__(self) -> None:
        if not self.group:
            raise ValueError("group must be non-empty")
        if self.y_true not in (0, 1) or self.y_pred not in (0, 1):
            raise ValueError(
                f"outcomes must be 0 or 1, got y_true={self.y_true!r} y_pred={self.y_pred!r}"
            )


@dataclass(frozen=True)
class BiasMetric:
    """A named fairness measurement with its gating thresholds.

    ``thresholds`` is either a single bound (direction given by
    ``bigger_is_better``) or a closed ``(lo, hi)`` interval.
    """

    name: str
    value: float
    description: str = ""
    thresholds: float | tuple[float, float] | None = None
    bigger_is_better: bool = False
    notes: str | None = None
    sg: str | None = None

    def __post_init__(self) -> None:
        if isinstance(self.thresholds, tuple):
            lo, hi = self.thresholds
            if lo > hi:
                raise ValueError(f"interval thresholds require lo <= hi, got [{lo}, {hi}]")


class GateResult(Enum):
    PASS = "pass"
    FAIL = "fail"


def confusion_from_records(records: Iterable[PredictionRecord]) -> dict[str, ConfusionCounts]:
    """Tally per-group confusion counts from raw prediction records."""
    tallies: dict[str, list[int]] = {}
    for record in records:
        cell = tallies.setdefault(record.group, [0, 0, 0, 0])
        if record.y_true == 1 and record.y_pred == 1:
            cell[0] += 1
        elif record.y_true == 0 and record.y_pred == 1:
            cell[1] += 1
        elif record.y_true == 0 and record.y_pred == 0:
            cell[2] += 1
        else:
            cell[3] += 1
    return {
        group: ConfusionCounts(tps=c[0], fps=c[1], tns=c[2], fns=c[3])
        for group, c in sorted(tallies.items())
    }


def _ratio(num: int, den: int) -> float | None:
    return num / den if den else None


def group_rates(counts: ConfusionCounts) -> RateBundle:
    """Derive selection rate, TPR, FPR, precision, accuracy, and F1."""
    precision = _ratio(counts.tps, counts.tps + counts.fps)
    tpr = _ratio(counts.tps, counts.tps + counts.fns)
    f1 = None
    if precision is not None and tpr is not None and precision + tpr > 0:
        f1 = 2 * precision * tpr / (precision + tpr)
    return RateBundle(
        selection_rate=_ratio(counts.tps + counts.fps, counts.total),
        tpr=tpr,
        fpr=_ratio(counts.fps, counts.fps + counts.tns),
        precision=precision,
        accuracy=_ratio(counts.tps + counts.tns, counts.total),
        f1=f1,
    )


def _check_groups(groups: Sequence[GroupOutcome]) -> None:
    if len(groups) < 2:
        raise TooFewGroupsError(f"need at least 2 groups, got {len(groups)}")
    names = [g.group_name for g in groups]
    if len(set(names)) != len(names):
        raise ValueError(f"duplicate group names: {sorted(names)}")


def _selection_rates(groups: Sequence[GroupOutcome]) -> list[float]:
    rates = []
    for group in groups:
        rate = group_rates(group.counts).selection_rate
        if rate is None:
            raise UndefinedRateError(group.group_name, "selection_rate")
        rates.append(rate)
    return rates


def _tprs(groups: Sequence[GroupOutcome]) -> list[float]:
    rates = []
    for group in groups:
        rate = group_rates(group.counts).tpr
        if rate is None:
            raise UndefinedRateError(group.group_name, "tpr")
        rates.append(rate)
    return rates


def _fprs(groups: Sequence[GroupOutcome]) -> list[float]:
    rates = []
    for group in groups:
        rate = group_rates(group.counts).fpr
        if rate is None:
            raise UndefinedRateError(group.group_name, "fpr")
        rates.append(rate)
    return rates


def demographic_parity_difference(groups: Sequence[GroupOutcome]) -> float:
    """Largest spread of selection rates across groups (max - min)."""
    _check_groups(groups)
    rates = _selection_rates(groups)
    return max(rates) - min(rates)


def demographic_parity_ratio(groups: Sequence[GroupOutcome]) -> float | None:
    """Smallest-to-largest selection rate ratio; ``None`` when all rates are 0."""
    _check_groups(groups)
    rates = _selection_rates(groups)
    if max(rates) == 0:
        return None
    return min(rates) / max(rates)


def equal_opportunity_difference(groups: Sequence[GroupOutcome]) -> float:
    """Largest spread of true-positive rates across groups."""
    _check_groups(groups)
    rates = _tprs(groups)
    return max(rates) - min(rates)


def equalized_odds_difference(groups: Sequence[GroupOutcome]) -> float:
    """Worse of the TPR spread and the FPR spread across groups."""
    _check_groups(groups)
    tprs = _tprs(groups)
    fprs = _fprs(groups)
    return max(max(tprs) - min(tprs), max(fprs) - min(fprs))


def evaluate_threshold(metric: BiasMetric) -> GateResult:
    """Gate a metric value against its thresholds; boundary values pass."""
    thresholds = metric.thresholds
    if thresholds is None:
        raise MissingThresholdError(f"metric {metric.name!r} has no thresholds")
    if isinstance(thresholds, tuple):
        lo, hi = thresholds
        ok = lo <= metric.value <= hi
    elif metric.bigger_is_better:
        ok = metric.value >= thresholds
    else:
        ok = metric.value <= thresholds
    return GateResult.PASS if ok else GateResult.FAIL
