"""Bind evidence nodes to artifact fields and evaluate the case against them.

A binding points one evidence element at a field path inside a parsed
artifact and attaches one or more checks (existence, equality, metric gate,
freshness). Evaluation is pure: artifacts and the clock are explicit inputs,
so identical inputs always produce identical results.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from datetime import datetime, timedelta, timezone
from enum import Enum
from pathlib import Path
from typing import Any, Iterable, Mapping, Sequence

from .case import (
    AssuranceCase,
    ElementKind,
    EvidenceState,
    CaseStatus,
    rollup_status,
    validate_case,
)
from .diffing import DocumentDiff, diff_trees
from .errors import (
    Diagnostic,
    DocumentSyntaxError,
    DuplicateBindingError,
    InvalidCaseError,
    SchemaError,
    UnknownIdError,
    UnorderedSnapshotsError,
)
from .fairlog import parse_bias_metric
from .metrics import BiasMetric, GateResult, evaluate_threshold
from .yamlio import (
    dump_yaml,
    load_yaml,
    parse_duration,
    parse_instant,
    require_list,
    require_mapping,
    require_str,
    resolve_path,
)


class _Missing:
    """Sentinel for an absent artifact value (distinct from a null field)."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "Missing"

    def __bool__(self) -> bool:
        return False


MISSING = _Missing()


class CheckKind(Enum):
    EXISTS = "exists"
    EQUALS = "equals"
    METRIC_GATE = "metric_gate"
    FRESH_WITHIN = "fresh_within"


@dataclass(frozen=True)
class Check:
    kind: CheckKind
    expected: Any = None
    max_age: timedelta | None = None


@dataclass(frozen=True)
class EvidenceBinding:
    """Where one evidence node's backing value lives and how to judge it."""

    evidence_id: str
    artifact: str
    path: str
    checks: tuple[Check, ...]

    def __post_init__(self) -> None:
        if not self.checks:
            raise ValueError(f"binding for {self.evidence_id!r} needs at least one check")


@dataclass(frozen=True)
class ParsedArtifact:
    name: str
    digest: str
    tree: Any = None


@dataclass(frozen=True)
class EvidenceResult:
    state: EvidenceState
    detail: str


@dataclass(frozen=True)
class CaseEvaluation:
    evaluated_at: datetime
    evidence_results: Mapping[str, EvidenceResult]
    rollup: CaseStatus
    artifacts_seen: tuple[tuple[str, str], ...]


@dataclass(frozen=True)
class TimelineEntry:
    at: datetime
    evaluation: CaseEvaluation
    transitions: tuple[tuple[str, str, str], ...] = ()
    artifact_diffs: Mapping[str, DocumentDiff] = field(default_factory=dict)


@dataclass(frozen=True)
class Timeline:
    entries: tuple[TimelineEntry, ...] = ()


def load_artifact(name: str, data: bytes) -> ParsedArtifact:
    digest = hashlib.sha256(data).hexdigest()
    try:
        tree = load_yaml(data.decode("utf-8"))
    except (DocumentSyntaxError, UnicodeDecodeError):
        tree = None
    return ParsedArtifact(name=name, digest=digest, tree=tree)


def load_artifact_dir(directory: str | Path) -> dict[str, ParsedArtifact]:
    """Parse every .yaml/.yml file directly inside a directory, keyed by filename."""
    directory = Path(directory)
    artifacts: dict[str, ParsedArtifact] = {}
    for path in sorted(directory.iterdir()):
        if path.suffix not in (".yaml", ".yml") or not path.is_file():
            continue
        artifacts[path.name] = load_artifact(path.name, path.read_bytes())
    return artifacts


def resolve_binding(
    binding: EvidenceBinding, artifacts: Mapping[str, ParsedArtifact]
) -> Any:
    """Value at the binding's path, or the MISSING sentinel."""
    artifact = artifacts.get(binding.artifact)
    if artifact is None or artifact.tree is None:
        return MISSING
    found, value = resolve_path(artifact.tree, binding.path)
    return value if found else MISSING


def _format_threshold(metric: BiasMetric) -> str:
    if isinstance(metric.thresholds, tuple):
        lo, hi = metric.thresholds
        return f"[{lo}, {hi}]"
    direction = "bigger is better" if metric.bigger_is_better else "smaller is better"
    return f"{metric.thresholds} ({direction})"


def _run_check(
    check: Check,
    binding: EvidenceBinding,
    artifact: ParsedArtifact | None,
    now: datetime,
) -> tuple[EvidenceState, str]:
    where = f"{binding.artifact}:{binding.path}"
    if artifact is None or artifact.tree is None:
        return EvidenceState.MISSING, f"artifact absent: {binding.artifact}"

    if check.kind is CheckKind.FRESH_WITHIN:
        found, stamp = resolve_path(artifact.tree, "general/timestamp")
        if not found:
            return EvidenceState.MISSING, f"no general/timestamp in {binding.artifact}"
        try:
            recorded = parse_instant(stamp, "general/timestamp")
        except SchemaError as exc:
            return EvidenceState.FAILING, f"unreadable timestamp in {binding.artifact}: {exc}"
        age = now - recorded
        assert check.max_age is not None
        if age > check.max_age:
            return (
                EvidenceState.STALE,
                f"artifact is {age.days}d old, exceeds max age {check.max_age.days}d",
            )
        return EvidenceState.PASSING, f"fresh ({age.days}d old)"

    found, value = resolve_path(artifact.tree, binding.path)
    if not found:
        return EvidenceState.MISSING, f"no value at {where}"

    if check.kind is CheckKind.EXISTS:
        return EvidenceState.PASSING, f"value present at {where}"

    if check.kind is CheckKind.EQUALS:
        if value != check.expected:
            return (
                EvidenceState.FAILING,
                f"value mismatch at {where}: expected {check.expected!r}, found {value!r}",
            )
        return EvidenceState.PASSING, f"value equals {check.expected!r}"

    # metric gate
    try:
        metric, _ = parse_bias_metric(value, binding.path)
    except SchemaError as exc:
        return EvidenceState.FAILING, f"not a readable metric at {where}: {exc}"
    if metric.thresholds is None:
        return EvidenceState.FAILING, f"{metric.name}: no thresholds to gate against"
    if evaluate_threshold(metric) is GateResult.FAIL:
        return (
            EvidenceState.FAILING,
            f"{metric.name}: value {metric.value} violates threshold {_format_threshold(metric)}",
        )
    return (
        EvidenceState.PASSING,
        f"{metric.name}: value {metric.value} within threshold {_format_threshold(metric)}",
    )


def check_evidence(
    binding: EvidenceBinding,
    artifacts: Mapping[str, ParsedArtifact],
    now: datetime,
) -> EvidenceResult:
    """Run the binding's checks in order; the first non-pass wins."""
    artifact = artifacts.get(binding.artifact)
    notes = []
    for check in binding.checks:
        state, detail = _run_check(check, binding, artifact, now)
        if state is not EvidenceState.PASSING:
            return EvidenceResult(state=state, detail=detail)
        notes.append(detail)
    return EvidenceResult(state=EvidenceState.PASSING, detail="; ".join(notes))


def evaluate_case(
    case: AssuranceCase,
    bindings: Sequence[EvidenceBinding],
    artifacts: Mapping[str, ParsedArtifact],
    now: datetime,
) -> CaseEvaluation:
    """Check every evidence node and roll statuses up to the goal."""
    diags = validate_case(case)
    if diags:
        raise InvalidCaseError(diags)
    if now.tzinfo is None:
        now = now.replace(tzinfo=timezone.utc)

    by_evidence: dict[str, EvidenceBinding] = {}
    for binding in bindings:
        if binding.evidence_id in by_evidence:
            raise DuplicateBindingError(
                f"two bindings target evidence {binding.evidence_id!r}"
            )
        element = case.elements.get(binding.evidence_id)
        if element is None or element.kind is not ElementKind.EVIDENCE:
            raise UnknownIdError(
                f"binding target {binding.evidence_id!r} is not an evidence element"
            )
        by_evidence[binding.evidence_id] = binding

    results: dict[str, EvidenceResult] = {}
    for eid in case.evidence_ids():
        if eid in by_evidence:
            results[eid] = check_evidence(by_evidence[eid], artifacts, now)
        else:
            results[eid] = EvidenceResult(state=EvidenceState.MISSING, detail="no binding")

    rollup = rollup_status(case, {eid: r.state for eid, r in results.items()})
    seen = tuple((name, artifacts[name].digest) for name in sorted(artifacts))
    return CaseEvaluation(
        evaluated_at=now.astimezone(timezone.utc),
        evidence_results=results,
        rollup=rollup,
        artifacts_seen=seen,
    )


def build_timeline(
    case: AssuranceCase,
    bindings: Sequence[EvidenceBinding],
    snapshots: Sequence[tuple[datetime, Mapping[str, ParsedArtifact]]],
) -> Timeline:
    """Evaluate each artifact snapshot and record diffs and status transitions."""
    instants = [at for at, _ in snapshots]
    for earlier, later in zip(instants, instants[1:]):
        if earlier >= later:
            raise UnorderedSnapshotsError(
                f"snapshots must be strictly increasing: {earlier} !< {later}"
            )

    entries: list[TimelineEntry] = []
    previous: tuple[Mapping[str, ParsedArtifact], CaseEvaluation] | None = None
    for at, artifacts in snapshots:
        evaluation = evaluate_case(case, bindings, artifacts, now=at)
        transitions: list[tuple[str, str, str]] = []
        diffs: dict[str, DocumentDiff] = {}
        if previous is not None:
            prev_artifacts, prev_eval = previous
            for eid in sorted(evaluation.rollup.statuses):
                before = prev_eval.rollup.statuses.get(eid)
                after = evaluation.rollup.statuses[eid]
                if before is not None and before is not after:
                    transitions.append((eid, before.value, after.value))
            for name in sorted(set(prev_artifacts) | set(artifacts)):
                before_tree = prev_artifacts[name].tree if name in prev_artifacts else None
                after_tree = artifacts[name].tree if name in artifacts else None
                diff = diff_trees(before_tree, after_tree)
                if not diff.is_empty():
                    diffs[name] = diff
        entries.append(
            TimelineEntry(
                at=at,
                evaluation=evaluation,
                transitions=tuple(transitions),
                artifact_diffs=diffs,
            )
        )
        previous = (artifacts, evaluation)
    return Timeline(entries=tuple(entries))


# --- bindings file -----------------------------------------------------------

_CHECK_KINDS = {kind.value: kind for kind in CheckKind}


def parse_bindings(text: str) -> list[EvidenceBinding]:
    """Read a bindings file: a YAML list of evidence-to-artifact mappings."""
    doc = load_yaml(text)
    bindings: list[EvidenceBinding] = []
    for i, raw in enumerate(require_list(doc if doc is not None else [], "")):
        mapping = require_mapping(raw, str(i))
        for key in ("evidence_id", "artifact", "path"):
            if key not in mapping:
                raise SchemaError(f"{i}/{key}", "missing")
        checks: list[Check] = []
        for j, raw_check in enumerate(require_list(mapping.get("checks") or [], f"{i}/checks")):
            check = require_mapping(raw_check, f"{i}/checks/{j}")
            kind_name = require_str(check.get("type") or "", f"{i}/checks/{j}/type")
            if kind_name not in _CHECK_KINDS:
                allowed = ", ".join(_CHECK_KINDS)
                raise SchemaError(
                    f"{i}/checks/{j}/type",
                    f"unknown check type {kind_name!r}; expected one of: {allowed}",
                )
            kind = _CHECK_KINDS[kind_name]
            if kind is CheckKind.EQUALS:
                if "expected" not in check:
                    raise SchemaError(f"{i}/checks/{j}/expected", "missing")
                checks.append(Check(kind=kind, expected=check["expected"]))
            elif kind is CheckKind.FRESH_WITHIN:
                if "max_age" not in check:
                    raise SchemaError(f"{i}/checks/{j}/max_age", "missing")
                checks.append(
                    Check(kind=kind, max_age=parse_duration(check["max_age"], f"{i}/checks/{j}/max_age"))
                )
            else:
                checks.append(Check(kind=kind))
        if not checks:
            raise SchemaError(f"{i}/checks", "at least one check is required")
        bindings.append(
            EvidenceBinding(
                evidence_id=require_str(mapping["evidence_id"], f"{i}/evidence_id", allow_empty=False),
                artifact=require_str(mapping["artifact"], f"{i}/artifact", allow_empty=False),
                path=require_str(mapping["path"], f"{i}/path"),
                checks=tuple(checks),
            )
        )
    return bindings


def serialize_bindings(bindings: Iterable[EvidenceBinding]) -> str:
    out = []
    for binding in bindings:
        checks = []
        for check in binding.checks:
            entry: dict[str, Any] = {"type": check.kind.value}
            if check.kind is CheckKind.EQUALS:
                entry["expected"] = check.expected
            elif check.kind is CheckKind.FRESH_WITHIN:
                assert check.max_age is not None
                entry["max_age"] = f"{check.max_age.total_seconds() / 86400:g}d"
            checks.append(entry)
        out.append(
            {
                "evidence_id": binding.evidence_id,
                "artifact": binding.artifact,
                "path": binding.path,
                "checks": checks,
            }
        )
    return dump_yaml(out)
