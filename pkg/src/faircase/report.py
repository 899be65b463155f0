"""Render case evaluations and timelines as markdown or machine documents.

The machine format mirrors the evaluation value exactly and parses back to
an equal value; the markdown report is the human surface for CI logs and
review. Both are deterministic for identical inputs.
"""

from __future__ import annotations

from datetime import datetime
from typing import Mapping

from .binder import CaseEvaluation, EvidenceResult, Timeline
from .case import (
    AssuranceCase,
    CaseStatus,
    ElementKind,
    ElementStatus,
    EvidenceState,
    render_diagram,
)
from .diffing import ChangeKind
from .errors import SchemaError
from .yamlio import (
    dump_yaml,
    format_instant,
    load_yaml,
    parse_instant,
    require_list,
    require_mapping,
    require_str,
)

REPORT_FORMATS = ("markdown", "machine")


def _status_cell(status: ElementStatus) -> str:
    return status.value.upper()


def render_markdown_report(case: AssuranceCase, evaluation: CaseEvaluation) -> str:
    """Markdown report: status table, evidence detail, artifact digests, diagram."""
    reasons = dict(evaluation.rollup.reasons)
    root_status = evaluation.rollup.statuses.get(case.root)
    lines = [
        f"# Assurance Report: {case.case_id}",
        "",
        f"Evaluated at {format_instant(evaluation.evaluated_at)}",
        "",
        f"**Goal {case.root}** ({case.elements[case.root].text}): "
        f"{_status_cell(root_status) if root_status else 'NOT_EVALUATED'}",
        "",
        "## Element status",
        "",
        "| element | kind | status | detail |",
        "| --- | --- | --- | --- |",
    ]
    for eid in sorted(evaluation.rollup.statuses):
        element = case.elements[eid]
        status = evaluation.rollup.statuses[eid]
        if element.kind is ElementKind.EVIDENCE:
            detail = evaluation.evidence_results[eid].detail
        else:
            detail = reasons.get(eid, "")
        detail = detail.replace("|", "\\|")
        lines.append(f"| {eid} | {element.kind.value} | {_status_cell(status)} | {detail} |")

    lines += ["", "## Evidence", ""]
    for eid in sorted(evaluation.evidence_results):
        result = evaluation.evidence_results[eid]
        element = case.elements[eid]
        meta = element.evidence_meta
        lines.append(f"- **{eid}** [{result.state.value}] {element.text}")
        lines.append(f"  - detail: {result.detail}")
        if meta is not None:
            lines.append(
                "  - quality: "
                f"relevance={meta.relevance.value}, completeness={meta.completeness.value}, "
                f"admissibility={meta.admissibility.value}, accuracy={meta.accuracy.value}"
            )

    lines += ["", "## Artifacts", "", "| file | sha256 |", "| --- | --- |"]
    for name, digest in evaluation.artifacts_seen:
        lines.append(f"| {name} | {digest} |")

    lines += ["", "## Diagram", "", "```mermaid"]
    lines.append(render_diagram(case, evaluation.rollup).rstrip("\n"))
    lines += ["```", ""]
    return "\n".join(lines)


def evaluation_to_plain(evaluation: CaseEvaluation) -> dict:
    return {
        "evaluated_at": format_instant(evaluation.evaluated_at),
        "evidence_results": {
            eid: {
                "state": evaluation.evidence_results[eid].state.value,
                "detail": evaluation.evidence_results[eid].detail,
            }
            for eid in sorted(evaluation.evidence_results)
        },
        "rollup": {
            "statuses": {
                eid: evaluation.rollup.statuses[eid].value
                for eid in sorted(evaluation.rollup.statuses)
            },
            "reasons": [
                {"element": eid, "reason": reason} for eid, reason in evaluation.rollup.reasons
            ],
        },
        "artifacts_seen": [
            {"file": name, "digest": digest} for name, digest in evaluation.artifacts_seen
        ],
    }


def render_machine_report(evaluation: CaseEvaluation) -> str:
    return dump_yaml(evaluation_to_plain(evaluation))


def parse_machine_report(text: str) -> CaseEvaluation:
    """Read a machine report back into an evaluation value."""
    doc = require_mapping(load_yaml(text), "")
    for key in ("evaluated_at", "evidence_results", "rollup", "artifacts_seen"):
        if key not in doc:
            raise SchemaError(key, "missing required key")
    evidence_results: dict[str, EvidenceResult] = {}
    for eid, raw in require_mapping(doc["evidence_results"], "evidence_results").items():
        entry = require_mapping(raw, f"evidence_results/{eid}")
        try:
            state = EvidenceState(require_str(entry.get("state") or "", f"evidence_results/{eid}/state"))
        except ValueError:
            raise SchemaError(f"evidence_results/{eid}/state", f"unknown state {entry.get('state')!r}")
        evidence_results[eid] = EvidenceResult(
            state=state, detail=require_str(entry.get("detail") or "", f"evidence_results/{eid}/detail")
        )
    rollup_raw = require_mapping(doc["rollup"], "rollup")
    statuses: dict[str, ElementStatus] = {}
    for eid, raw in require_mapping(rollup_raw.get("statuses") or {}, "rollup/statuses").items():
        try:
            statuses[eid] = ElementStatus(require_str(raw, f"rollup/statuses/{eid}"))
        except ValueError:
            raise SchemaError(f"rollup/statuses/{eid}", f"unknown status {raw!r}")
    reasons = tuple(
        (
            require_str(require_mapping(r, f"rollup/reasons/{i}").get("element") or "", f"rollup/reasons/{i}/element"),
            require_str(require_mapping(r, f"rollup/reasons/{i}").get("reason") or "", f"rollup/reasons/{i}/reason"),
        )
        for i, r in enumerate(require_list(rollup_raw.get("reasons") or [], "rollup/reasons"))
    )
    artifacts_seen = tuple(
        (
            require_str(require_mapping(a, f"artifacts_seen/{i}").get("file") or "", f"artifacts_seen/{i}/file"),
            require_str(require_mapping(a, f"artifacts_seen/{i}").get("digest") or "", f"artifacts_seen/{i}/digest"),
        )
        for i, a in enumerate(require_list(doc["artifacts_seen"], "artifacts_seen"))
    )
    return CaseEvaluation(
        evaluated_at=parse_instant(doc["evaluated_at"], "evaluated_at"),
        evidence_results=evidence_results,
        rollup=CaseStatus(statuses=statuses, reasons=reasons),
        artifacts_seen=artifacts_seen,
    )


def render_timeline_markdown(case: AssuranceCase, timeline: Timeline) -> str:
    lines = [f"# Assurance Timeline: {case.case_id}", ""]
    for entry in timeline.entries:
        root_status = entry.evaluation.rollup.statuses.get(case.root)
        lines.append(
            f"## {format_instant(entry.at)} — goal "
            f"{_status_cell(root_status) if root_status else 'NOT_EVALUATED'}"
        )
        lines.append("")
        if entry.transitions:
            lines.append("Transitions:")
            for eid, before, after in entry.transitions:
                lines.append(f"- {eid}: {before.upper()} -> {after.upper()}")
            lines.append("")
        if entry.artifact_diffs:
            lines.append("Artifact changes:")
            for name in sorted(entry.artifact_diffs):
                for d in entry.artifact_diffs[name].entries:
                    if d.change is ChangeKind.MODIFIED:
                        lines.append(f"- {name}:{d.path} modified {d.before!r} -> {d.after!r}")
                    elif d.change is ChangeKind.ADDED:
                        lines.append(f"- {name}:{d.path} added {d.after!r}")
                    else:
                        lines.append(f"- {name}:{d.path} removed {d.before!r}")
            lines.append("")
    return "\n".join(lines)


def render_timeline_machine(timeline: Timeline) -> str:
    entries = []
    for entry in timeline.entries:
        entries.append(
            {
                "at": format_instant(entry.at),
                "evaluation": evaluation_to_plain(entry.evaluation),
                "transitions": [
                    {"element": eid, "before": before, "after": after}
                    for eid, before, after in entry.transitions
                ],
                "artifact_diffs": {
                    name: [
                        {
                            "path": d.path,
                            "change": d.change.value,
                            "before": d.before,
                            "after": d.after,
                        }
                        for d in entry.artifact_diffs[name].entries
                    ]
                    for name in sorted(entry.artifact_diffs)
                },
            }
        )
    return dump_yaml({"timeline": entries})


def generate_report(
    case: AssuranceCase,
    result: CaseEvaluation | Timeline,
    fmt: str = "markdown",
) -> str:
    """Render an evaluation or a timeline in the requested format."""
    if fmt not in REPORT_FORMATS:
        raise ValueError(f"unknown report format {fmt!r}; expected one of {REPORT_FORMATS}")
    if isinstance(result, Timeline):
        if fmt == "markdown":
            return render_timeline_markdown(case, result)
        return render_timeline_machine(result)
    if fmt == "markdown":
        return render_markdown_report(case, result)
    return render_machine_report(result)
