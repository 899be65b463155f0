"""RAID records (risks, assumptions, issues, dependencies) and issue export.

Failing evidence gates and declared risks become issue-tracker payloads with
a stable idempotency key derived from (kind, title, origin), so repeated
exports never file duplicates.
"""

from __future__ import annotations

import hashlib
import json
import re
from dataclasses import dataclass
from enum import Enum
from typing import TYPE_CHECKING, Iterable, Sequence

from .case import EvidenceState
from .errors import SchemaError
from .yamlio import require_list, require_mapping, require_str

if TYPE_CHECKING:
    from .binder import CaseEvaluation
    from .fairlog import FairnessLog


class RaidKind(Enum):
    RISK = "Risk"
    ASSUMPTION = "Assumption"
    ISSUE = "Issue"
    DEPENDENCY = "Dependency"


class Severity(Enum):
    LOW = "low"
    MEDIUM = "medium"
    HIGH = "high"


@dataclass(frozen=True)
class Origin:
    experiment_id: str | None = None
    evidence_id: str | None = None


@dataclass(frozen=True)
class RaidRecord:
    kind: RaidKind
    title: str
    description: str = ""
    severity: Severity = Severity.MEDIUM
    linked_elements: tuple[str, ...] = ()
    labels: tuple[str, ...] = ()
    origin: Origin = Origin()

    def __post_init__(self) -> None:
        if not self.title.strip():
            raise ValueError("RAID record title must be non-empty")


@dataclass(frozen=True)
class IssuePayload:
    """Issue-tracker wire form: exactly title, body, labels on the wire."""

    title: str
    body: str
    labels: tuple[str, ...]
    idempotency_key: str


_KEY_FOOTER_RE = re.compile(r"<!--\s*raid-key:\s*([0-9a-f]{64})\s*-->")


def idempotency_key(record: RaidRecord) -> str:
    """Stable digest of (kind, title, origin); ignores description and labels."""
    basis = "\n".join(
        (
            record.kind.value,
            record.title,
            record.origin.experiment_id or "",
            record.origin.evidence_id or "",
        )
    )
    return hashlib.sha256(basis.encode("utf-8")).hexdigest()


def extract_raids(
    log: FairnessLog, evaluation: CaseEvaluation | None = None
) -> list[RaidRecord]:
    """Declared records from the log, then one auto issue per failing evidence."""
    records = list(log.risks)
    if evaluation is not None:
        for eid in sorted(evaluation.evidence_results):
            result = evaluation.evidence_results[eid]
            if result.state is not EvidenceState.FAILING:
                continue
            label = result.detail.split(":", 1)[0].strip() or "gate"
            records.append(
                RaidRecord(
                    kind=RaidKind.ISSUE,
                    title=f"Evidence {eid} failing: {label}",
                    description=f"Automated issue from a failing evidence gate. {result.detail}",
                    severity=Severity.HIGH,
                    linked_elements=(eid,),
                    origin=Origin(
                        experiment_id=log.general.experiment_id, evidence_id=eid
                    ),
                )
            )
    return records


def to_issue_payload(record: RaidRecord) -> IssuePayload:
    """Render a record as an issue payload with a machine-readable key footer."""
    key = idempotency_key(record)
    lines = []
    if record.description:
        lines.append(record.description)
        lines.append("")
    lines.append(f"- Severity: {record.severity.value}")
    if record.linked_elements:
        lines.append(f"- Linked elements: {', '.join(record.linked_elements)}")
    if record.origin.experiment_id:
        lines.append(f"- Origin experiment: {record.origin.experiment_id}")
    if record.origin.evidence_id:
        lines.append(f"- Origin evidence: {record.origin.evidence_id}")
    lines.append("")
    lines.append(f"<!-- raid-key: {key} -->")

    labels: list[str] = []
    for label in (record.kind.value.lower(), record.severity.value, *record.labels):
        if label not in labels:
            labels.append(label)
    return IssuePayload(
        title=f"[RAID:{record.kind.value}] {record.title}",
        body="\n".join(lines),
        labels=tuple(labels),
        idempotency_key=key,
    )


def plan_submission(
    payloads: Sequence[IssuePayload], existing_keys: set[str]
) -> list[IssuePayload]:
    """Keep only payloads whose key is not already filed, preserving order."""
    return [p for p in payloads if p.idempotency_key not in existing_keys]


def payload_to_json(payload: IssuePayload) -> str:
    """Wire JSON with exactly title, body, labels."""
    return (
        json.dumps(
            {"title": payload.title, "body": payload.body, "labels": list(payload.labels)},
            indent=2,
            sort_keys=True,
            ensure_ascii=False,
        )
        + "\n"
    )


def keys_from_issue_bodies(bodies: Iterable[str]) -> set[str]:
    """Collect raid-key footers from previously filed issue bodies."""
    keys = set()
    for body in bodies:
        keys.update(_KEY_FOOTER_RE.findall(body or ""))
    return keys


# --- YAML (de)serialization used by the fairness log -------------------------

_KIND_BY_NAME = {k.value: k for k in RaidKind}
_SEVERITY_BY_NAME = {s.value: s for s in Severity}


def parse_raid(raw: object, path: str) -> RaidRecord:
    mapping = require_mapping(raw, path)
    if "kind" not in mapping:
        raise SchemaError(f"{path}/kind", "missing")
    kind_name = require_str(mapping["kind"], f"{path}/kind")
    if kind_name not in _KIND_BY_NAME:
        allowed = ", ".join(_KIND_BY_NAME)
        raise SchemaError(f"{path}/kind", f"unknown kind {kind_name!r}; expected one of: {allowed}")
    if "title" not in mapping:
        raise SchemaError(f"{path}/title", "missing")
    title = require_str(mapping["title"], f"{path}/title", allow_empty=False)

    severity = Severity.MEDIUM
    if mapping.get("severity") is not None:
        severity_name = require_str(mapping["severity"], f"{path}/severity")
        if severity_name not in _SEVERITY_BY_NAME:
            allowed = ", ".join(_SEVERITY_BY_NAME)
            raise SchemaError(
                f"{path}/severity", f"unknown severity {severity_name!r}; expected one of: {allowed}"
            )
        severity = _SEVERITY_BY_NAME[severity_name]

    linked = tuple(
        require_str(v, f"{path}/linked_elements/{i}")
        for i, v in enumerate(require_list(mapping.get("linked_elements") or [], f"{path}/linked_elements"))
    )
    labels = tuple(
        require_str(v, f"{path}/labels/{i}")
        for i, v in enumerate(require_list(mapping.get("labels") or [], f"{path}/labels"))
    )
    origin = Origin()
    if mapping.get("origin") is not None:
        origin_map = require_mapping(mapping["origin"], f"{path}/origin")
        experiment_id = origin_map.get("experiment_id")
        evidence_id = origin_map.get("evidence_id")
        origin = Origin(
            experiment_id=require_str(experiment_id, f"{path}/origin/experiment_id")
            if experiment_id is not None
            else None,
            evidence_id=require_str(evidence_id, f"{path}/origin/evidence_id")
            if evidence_id is not None
            else None,
        )

    return RaidRecord(
        kind=_KIND_BY_NAME[kind_name],
        title=title,
        description=require_str(mapping.get("description") or "", f"{path}/description"),
        severity=severity,
        linked_elements=linked,
        labels=labels,
        origin=origin,
    )


def raid_to_plain(record: RaidRecord) -> dict:
    out: dict = {"kind": record.kind.value, "title": record.title}
    if record.description:
        out["description"] = record.description
    out["severity"] = record.severity.value
    if record.linked_elements:
        out["linked_elements"] = list(record.linked_elements)
    if record.labels:
        out["labels"] = list(record.labels)
    origin: dict = {}
    if record.origin.experiment_id is not None:
        origin["experiment_id"] = record.origin.experiment_id
    if record.origin.evidence_id is not None:
        origin["evidence_id"] = record.origin.evidence_id
    if origin:
        out["origin"] = origin
    return out
