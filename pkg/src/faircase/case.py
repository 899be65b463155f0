"""Typed argument graph for assurance cases.

An assurance case is a directed graph of elements (goal claim, context,
strategies, property claims, evidence) rooted at a single goal. Cases are
immutable values: every operation returns a new case or a pure report, so
they are safe to share across threads.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Iterable, Mapping

from .errors import (
    CycleDetectedError,
    Diagnostic,
    DuplicateIdError,
    IllegalLinkKindError,
    IncompleteStatesError,
    InvalidCaseError,
    NonGoalRootError,
    SchemaError,
    UnknownIdError,
)
from .yamlio import dump_yaml, load_yaml, require_list, require_mapping, require_str


class ElementKind(Enum):
    GOAL = "goal"
    CONTEXT = "context"
    PROPERTY_CLAIM = "property_claim"
    STRATEGY = "strategy"
    EVIDENCE = "evidence"


class QualityLevel(Enum):
    UNASSESSED = "unassessed"
    LOW = "low"
    MEDIUM = "medium"
    HIGH = "high"


class ComponentKind(Enum):
    DATA = "data"
    MODEL = "model"
    INTERACTION = "interaction"


class TaxonomyLevel(Enum):
    STAGE = "Stage"
    COMPONENT = "Component"
    ASSESSMENT = "Assessment"
    IMPLICATION = "Implication"


class ElementStatus(Enum):
    SUPPORTED = "supported"
    UNSUPPORTED = "unsupported"
    FAILING = "failing"
    STALE = "stale"
    NOT_EVALUATED = "not_evaluated"


class EvidenceState(Enum):
    """Observed state of one evidence node, as fed into the roll-up."""

    PASSING = "passing"
    FAILING = "failing"
    MISSING = "missing"
    STALE = "stale"


@dataclass(frozen=True)
class EvidenceMeta:
    """Quality annotations carried on evidence nodes."""

    relevance: QualityLevel = QualityLevel.UNASSESSED
    completeness: QualityLevel = QualityLevel.UNASSESSED
    admissibility: QualityLevel = QualityLevel.UNASSESSED
    accuracy: QualityLevel = QualityLevel.UNASSESSED


@dataclass(frozen=True)
class TaxonomyTag:
    """Optional classification of a property claim.

    ``stage`` is a free-form lifecycle stage name, ``comp`` the system
    component the claim is about, ``level`` its depth in the claim hierarchy.
    """

    stage: str | None = None
    comp: ComponentKind | None = None
    level: TaxonomyLevel | None = None


@dataclass(frozen=True)
class Element:
    """One node of the argument graph.

    ``evidence_meta`` is present exactly on evidence elements; constructing
    an evidence element without it fills in unassessed quality levels.
    """

    id: str
    kind: ElementKind
    text: str
    taxonomy: TaxonomyTag | None = None
    evidence_meta: EvidenceMeta | None = None

    def __post_init__(self) -> None:
        if self.kind is ElementKind.EVIDENCE:
            if self.evidence_meta is None:
                object.__setattr__(self, "evidence_meta", EvidenceMeta())
        elif self.evidence_meta is not None:
            raise ValueError(
                f"element {self.id!r}: evidence_meta is only valid on evidence elements"
            )


@dataclass(frozen=True)
class AssuranceCase:
    """Immutable assurance case value.

    ``links`` are ordered (from, to) pairs; structural invariants are
    checked by :func:`validate_case`, not by construction, so that parsed
    documents can be diagnosed rather than rejected.
    """

    case_id: str
    title: str
    root: str
    elements: Mapping[str, Element]
    links: frozenset[tuple[str, str]]

    def element_ids(self) -> list[str]:
        return sorted(self.elements)

    def evidence_ids(self) -> list[str]:
        return sorted(
            eid for eid, el in self.elements.items() if el.kind is ElementKind.EVIDENCE
        )

    def children(self, element_id: str, include_context: bool = False) -> list[str]:
        """Successor ids of an element, sorted; context targets excluded by default."""
        out = []
        for frm, to in self.links:
            if frm != element_id or to not in self.elements:
                continue
            if not include_context and self.elements[to].kind is ElementKind.CONTEXT:
                continue
            out.append(to)
        return sorted(out)


@dataclass(frozen=True)
class CaseStatus:
    """Per-element roll-up result; context elements are not evaluated."""

    statuses: Mapping[str, ElementStatus]
    reasons: tuple[tuple[str, str], ...] = ()


_ALLOWED_LINKS = frozenset(
    {
        (ElementKind.GOAL, ElementKind.STRATEGY),
        (ElementKind.GOAL, ElementKind.PROPERTY_CLAIM),
        (ElementKind.STRATEGY, ElementKind.PROPERTY_CLAIM),
        (ElementKind.PROPERTY_CLAIM, ElementKind.PROPERTY_CLAIM),
        (ElementKind.PROPERTY_CLAIM, ElementKind.EVIDENCE),
        (ElementKind.CONTEXT, ElementKind.GOAL),
        (ElementKind.CONTEXT, ElementKind.STRATEGY),
        (ElementKind.CONTEXT, ElementKind.PROPERTY_CLAIM),
    }
)


def create_case(case_id: str, title: str, root_goal: Element) -> AssuranceCase:
    """Start a case from its root goal claim."""
    if root_goal.kind is not ElementKind.GOAL:
        raise NonGoalRootError(
            f"root element {root_goal.id!r} has kind {root_goal.kind.value!r}, expected goal"
        )
    return AssuranceCase(
        case_id=case_id,
        title=title,
        root=root_goal.id,
        elements={root_goal.id: root_goal},
        links=frozenset(),
    )


def add_element(case: AssuranceCase, element: Element) -> AssuranceCase:
    if element.id in case.elements:
        raise DuplicateIdError(f"element id {element.id!r} already present")
    elements = dict(case.elements)
    elements[element.id] = element
    return replace(case, elements=elements)


def add_link(case: AssuranceCase, frm: str, to: str) -> AssuranceCase:
    """Add a (from, to) link, rejecting unknown ids, cycles, and illegal kinds.

    An evidence source is always an illegal kind; any other edge that both
    closes a cycle and has an illegal kind pair is reported as the cycle.
    """
    for eid in (frm, to):
        if eid not in case.elements:
            raise UnknownIdError(f"link endpoint {eid!r} does not exist")
    if case.elements[frm].kind is ElementKind.EVIDENCE:
        raise IllegalLinkKindError(f"link {frm!r} -> {to!r}: evidence has no outgoing links")
    links = case.links | {(frm, to)}
    cycle = _find_cycle(case.elements, links)
    if cycle is not None:
        raise CycleDetectedError("cycle through " + " -> ".join(cycle))
    pair = (case.elements[frm].kind, case.elements[to].kind)
    if pair not in _ALLOWED_LINKS:
        raise IllegalLinkKindError(
            f"link {frm!r} -> {to!r}: {pair[0].value} -> {pair[1].value} is not allowed"
        )
    return replace(case, links=links)


def _non_context_links(
    elements: Mapping[str, Element], links: Iterable[tuple[str, str]]
) -> list[tuple[str, str]]:
    out = []
    for frm, to in links:
        if frm not in elements or to not in elements:
            continue
        if ElementKind.CONTEXT in (elements[frm].kind, elements[to].kind):
            continue
        out.append((frm, to))
    return out


def _find_cycle(
    elements: Mapping[str, Element], links: Iterable[tuple[str, str]]
) -> list[str] | None:
    """Depth-first search for a cycle in the non-context subgraph."""
    succ: dict[str, list[str]] = {}
    for frm, to in _non_context_links(elements, links):
        succ.setdefault(frm, []).append(to)
    for targets in succ.values():
        targets.sort()

    WHITE, GREY, BLACK = 0, 1, 2
    color = {eid: WHITE for eid in elements}
    stack: list[str] = []

    def visit(node: str) -> list[str] | None:
        color[node] = GREY
        stack.append(node)
        for nxt in succ.get(node, ()):
            if color[nxt] == GREY:
                return stack[stack.index(nxt) :] + [nxt]
            if color[nxt] == WHITE:
                found = visit(nxt)
                if found is not None:
                    return found
        stack.pop()
        color[node] = BLACK
        return None

    for eid in sorted(elements):
        if color[eid] == WHITE:
            found = visit(eid)
            if found is not None:
                return found
    return None


def validate_case(case: AssuranceCase) -> list[Diagnostic]:
    """Check every structural invariant; an empty list means the case is valid."""
    diags: list[Diagnostic] = []

    for eid in sorted(case.elements):
        element = case.elements[eid]
        if not eid:
            diags.append(Diagnostic("EmptyId", "element with empty id", (eid,)))
        if not element.text.strip():
            diags.append(Diagnostic("EmptyText", "element text is empty", (eid,)))

    if case.root not in case.elements:
        diags.append(
            Diagnostic("MissingRoot", f"root {case.root!r} is not an element", (case.root,))
        )
    elif case.elements[case.root].kind is not ElementKind.GOAL:
        diags.append(
            Diagnostic(
                "NonGoalRoot",
                f"root {case.root!r} has kind "
                f"{case.elements[case.root].kind.value!r}, expected goal",
                (case.root,),
            )
        )

    for frm, to in sorted(case.links):
        missing = [eid for eid in (frm, to) if eid not in case.elements]
        if missing:
            diags.append(
                Diagnostic(
                    "UnknownId",
                    f"link {frm!r} -> {to!r} references unknown element(s)",
                    tuple(missing),
                )
            )
            continue
        pair = (case.elements[frm].kind, case.elements[to].kind)
        if pair not in _ALLOWED_LINKS:
            diags.append(
                Diagnostic(
                    "IllegalLinkKind",
                    f"{pair[0].value} -> {pair[1].value} is not an allowed link",
                    (frm, to),
                )
            )

    cycle = _find_cycle(case.elements, case.links)
    if cycle is not None:
        diags.append(
            Diagnostic("CycleDetected", "cycle through " + " -> ".join(cycle), tuple(cycle[:-1]))
        )

    return diags


def _require_valid(case: AssuranceCase) -> None:
    diags = validate_case(case)
    if diags:
        raise InvalidCaseError(diags)


def unsupported_claims(case: AssuranceCase) -> list[str]:
    """Property claims with no directed path to any evidence node."""
    _require_valid(case)
    succ: dict[str, list[str]] = {}
    for frm, to in case.links:
        succ.setdefault(frm, []).append(to)

    def reaches_evidence(start: str) -> bool:
        seen = set()
        frontier = [start]
        while frontier:
            node = frontier.pop()
            if node in seen:
                continue
            seen.add(node)
            if case.elements[node].kind is ElementKind.EVIDENCE:
                return True
            frontier.extend(succ.get(node, ()))
        return False

    return sorted(
        eid
        for eid, el in case.elements.items()
        if el.kind is ElementKind.PROPERTY_CLAIM and not reaches_evidence(eid)
    )


def rollup_status(
    case: AssuranceCase, evidence_states: Mapping[str, EvidenceState]
) -> CaseStatus:
    """Propagate evidence states up the argument graph.

    Claims support an OR over their children with a failing veto; strategies
    and the goal require all children supported. Any failing descendant makes
    every ancestor failing; stale or missing evidence leaves ancestors
    unsupported rather than failing.
    """
    _require_valid(case)
    evidence_ids = set(case.evidence_ids())
    given = set(evidence_states)
    if given != evidence_ids:
        missing = sorted(evidence_ids - given)
        extra = sorted(given - evidence_ids)
        raise IncompleteStatesError(
            f"evidence states must cover exactly the evidence nodes"
            f" (missing: {missing}, unexpected: {extra})"
        )

    statuses: dict[str, ElementStatus] = {}
    reasons: list[tuple[str, str]] = []

    def status_of(eid: str) -> ElementStatus:
        if eid in statuses:
            return statuses[eid]
        element = case.elements[eid]
        if element.kind is ElementKind.EVIDENCE:
            state = evidence_states[eid]
            result = {
                EvidenceState.PASSING: ElementStatus.SUPPORTED,
                EvidenceState.FAILING: ElementStatus.FAILING,
                EvidenceState.MISSING: ElementStatus.STALE,
                EvidenceState.STALE: ElementStatus.STALE,
            }[state]
        else:
            child_statuses = [status_of(c) for c in case.children(eid)]
            if any(s is ElementStatus.FAILING for s in child_statuses):
                result = ElementStatus.FAILING
            elif element.kind is ElementKind.PROPERTY_CLAIM:
                result = (
                    ElementStatus.SUPPORTED
                    if any(s is ElementStatus.SUPPORTED for s in child_statuses)
                    else ElementStatus.UNSUPPORTED
                )
            else:
                # Goal / strategy: all children must be supported; an element
                # with no children has no support at all.
                result = (
                    ElementStatus.SUPPORTED
                    if child_statuses
                    and all(s is ElementStatus.SUPPORTED for s in child_statuses)
                    else ElementStatus.UNSUPPORTED
                )
        statuses[eid] = result
        return result

    for eid in sorted(case.elements):
        if case.elements[eid].kind is not ElementKind.CONTEXT:
            status_of(eid)

    for eid in sorted(statuses):
        status = statuses[eid]
        if status is ElementStatus.SUPPORTED:
            continue
        element = case.elements[eid]
        if element.kind is ElementKind.EVIDENCE:
            reasons.append((eid, f"evidence is {evidence_states[eid].value}"))
        elif status is ElementStatus.FAILING:
            failing = [c for c in case.children(eid) if statuses[c] is ElementStatus.FAILING]
            reasons.append((eid, "failing children: " + ", ".join(failing)))
        else:
            children = case.children(eid)
            if not children:
                reasons.append((eid, "no supporting children"))
            else:
                weak = [c for c in children if statuses[c] is not ElementStatus.SUPPORTED]
                reasons.append((eid, "unsupported children: " + ", ".join(weak)))

    return CaseStatus(statuses=statuses, reasons=tuple(reasons))


# --- serialization ---------------------------------------------------------

_KIND_BY_NAME = {kind.value: kind for kind in ElementKind}
_META_FIELDS = ("relevance", "completeness", "admissibility", "accuracy")


def _element_to_plain(element: Element) -> dict:
    out: dict = {"id": element.id, "kind": element.kind.value, "text": element.text}
    if element.taxonomy is not None:
        tax: dict = {}
        if element.taxonomy.stage is not None:
            tax["stage"] = element.taxonomy.stage
        if element.taxonomy.comp is not None:
            tax["comp"] = element.taxonomy.comp.value
        if element.taxonomy.level is not None:
            tax["level"] = element.taxonomy.level.value
        out["taxonomy"] = tax
    if element.evidence_meta is not None:
        out["evidence_meta"] = {
            name: getattr(element.evidence_meta, name).value for name in _META_FIELDS
        }
    return out


def serialize_case(case: AssuranceCase) -> str:
    """Render a case as deterministic YAML (elements and links sorted by id)."""
    doc = {
        "case_id": case.case_id,
        "title": case.title,
        "root": case.root,
        "elements": [_element_to_plain(case.elements[eid]) for eid in sorted(case.elements)],
        "links": [{"from": frm, "to": to} for frm, to in sorted(case.links)],
    }
    return dump_yaml(doc)


def _parse_quality(value: object, path: str) -> QualityLevel:
    name = require_str(value, path)
    try:
        return QualityLevel(name)
    except ValueError:
        allowed = ", ".join(level.value for level in QualityLevel)
        raise SchemaError(path, f"unknown quality level {name!r}; expected one of: {allowed}")


def _parse_element(raw: object, path: str) -> Element:
    mapping = require_mapping(raw, path)
    if "id" not in mapping:
        raise SchemaError(f"{path}/id", "missing")
    eid = require_str(mapping["id"], f"{path}/id", allow_empty=False)
    if "kind" not in mapping:
        raise SchemaError(f"{path}/kind", "missing")
    kind_name = require_str(mapping["kind"], f"{path}/kind")
    if kind_name not in _KIND_BY_NAME:
        allowed = ", ".join(sorted(_KIND_BY_NAME))
        raise SchemaError(
            f"{path}/kind", f"unknown element kind {kind_name!r}; expected one of: {allowed}"
        )
    kind = _KIND_BY_NAME[kind_name]
    if "text" not in mapping:
        raise SchemaError(f"{path}/text", "missing")
    text = require_str(mapping["text"], f"{path}/text")

    taxonomy = None
    if mapping.get("taxonomy") is not None:
        tax = require_mapping(mapping["taxonomy"], f"{path}/taxonomy")
        comp = None
        if tax.get("comp") is not None:
            comp_name = require_str(tax["comp"], f"{path}/taxonomy/comp")
            try:
                comp = ComponentKind(comp_name)
            except ValueError:
                allowed = ", ".join(c.value for c in ComponentKind)
                raise SchemaError(
                    f"{path}/taxonomy/comp",
                    f"unknown component {comp_name!r}; expected one of: {allowed}",
                )
        level = None
        if tax.get("level") is not None:
            level_name = require_str(tax["level"], f"{path}/taxonomy/level")
            try:
                level = TaxonomyLevel(level_name)
            except ValueError:
                allowed = ", ".join(v.value for v in TaxonomyLevel)
                raise SchemaError(
                    f"{path}/taxonomy/level",
                    f"unknown level {level_name!r}; expected one of: {allowed}",
                )
        stage = None
        if tax.get("stage") is not None:
            stage = require_str(tax["stage"], f"{path}/taxonomy/stage")
        taxonomy = TaxonomyTag(stage=stage, comp=comp, level=level)

    evidence_meta = None
    if mapping.get("evidence_meta") is not None:
        if kind is not ElementKind.EVIDENCE:
            raise SchemaError(
                f"{path}/evidence_meta", "only evidence elements carry quality annotations"
            )
        meta = require_mapping(mapping["evidence_meta"], f"{path}/evidence_meta")
        levels = {
            name: _parse_quality(meta[name], f"{path}/evidence_meta/{name}")
            for name in _META_FIELDS
            if name in meta
        }
        evidence_meta = EvidenceMeta(**levels)

    return Element(id=eid, kind=kind, text=text, taxonomy=taxonomy, evidence_meta=evidence_meta)


def parse_case(text: str) -> tuple[AssuranceCase, list[Diagnostic]]:
    """Parse a case document and return it with its validation diagnostics.

    Schema problems (missing keys, unknown kinds, duplicate ids) raise; graph
    invariant violations are represented and reported as diagnostics.
    """
    doc = load_yaml(text)
    mapping = require_mapping(doc, "")
    for key in ("case_id", "root", "elements"):
        if key not in mapping:
            raise SchemaError(key, "missing required key")
    case_id = require_str(mapping["case_id"], "case_id")
    title = require_str(mapping.get("title") or "", "title")
    root = require_str(mapping["root"], "root")

    elements: dict[str, Element] = {}
    for i, raw in enumerate(require_list(mapping["elements"], "elements")):
        element = _parse_element(raw, f"elements/{i}")
        if element.id in elements:
            raise SchemaError(f"elements/{i}/id", f"duplicate element id {element.id!r}")
        elements[element.id] = element

    links: set[tuple[str, str]] = set()
    for i, raw in enumerate(require_list(mapping.get("links") or [], "links")):
        link = require_mapping(raw, f"links/{i}")
        for key in ("from", "to"):
            if key not in link:
                raise SchemaError(f"links/{i}/{key}", "missing")
        links.add(
            (
                require_str(link["from"], f"links/{i}/from"),
                require_str(link["to"], f"links/{i}/to"),
            )
        )

    case = AssuranceCase(
        case_id=case_id, title=title, root=root, elements=elements, links=frozenset(links)
    )
    return case, validate_case(case)


# --- diagram ---------------------------------------------------------------

_LABEL_LIMIT = 60


def _label(element: Element) -> str:
    text = element.text.replace('"', "'")
    if len(text) > _LABEL_LIMIT:
        text = text[: _LABEL_LIMIT - 3] + "..."
    return text


def render_diagram(case: AssuranceCase, status: CaseStatus | None = None) -> str:
    """Emit a Mermaid flowchart: one node per element, one edge per link.

    With a roll-up given, evaluated nodes carry their status as a class;
    otherwise nodes are classed by element kind.
    """
    _require_valid(case)
    lines = ["graph TD"]
    for eid in sorted(case.elements):
        element = case.elements[eid]
        if status is not None and eid in status.statuses:
            cls = status.statuses[eid].value
        else:
            cls = element.kind.value
        lines.append(f'    {eid}["{eid}: {_label(element)}"]:::{cls}')
    for frm, to in sorted(case.links):
        arrow = "-.-" if case.elements[frm].kind is ElementKind.CONTEXT else "-->"
        lines.append(f"    {frm} {arrow} {to}")
    lines.append("    classDef goal fill:#dbeafe,stroke:#1d4ed8")
    lines.append("    classDef context fill:#f3f4f6,stroke:#6b7280")
    lines.append("    classDef property_claim fill:#ede9fe,stroke:#6d28d9")
    lines.append("    classDef strategy fill:#fef9c3,stroke:#a16207")
    lines.append("    classDef evidence fill:#dcfce7,stroke:#15803d")
    if status is not None:
        lines.append("    classDef supported fill:#dcfce7,stroke:#15803d")
        lines.append("    classDef unsupported fill:#fef9c3,stroke:#a16207")
        lines.append("    classDef failing fill:#fee2e2,stroke:#b91c1c")
        lines.append("    classDef stale fill:#e0e7ff,stroke:#4338ca")
        lines.append("    classDef not_evaluated fill:#f3f4f6,stroke:#6b7280")
    return "\n".join(lines) + "\n"
