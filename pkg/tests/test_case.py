"""Assurance case graph: construction, validation, roll-up, serialization."""

from __future__ import annotations

import random

import pytest

from conftest import make_case, make_evidence_states
from faircase.case import (
    AssuranceCase,
    Element,
    ElementKind,
    ElementStatus,
    EvidenceState,
    TaxonomyTag,
    ComponentKind,
    TaxonomyLevel,
    add_element,
    add_link,
    create_case,
    parse_case,
    render_diagram,
    rollup_status,
    serialize_case,
    unsupported_claims,
    validate_case,
)
from faircase.errors import (
    CycleDetectedError,
    DuplicateIdError,
    IllegalLinkKindError,
    IncompleteStatesError,
    InvalidCaseError,
    NonGoalRootError,
    SchemaError,
    UnknownIdError,
)

GOAL_TEXT = "promotes fair and equitable outcomes"


def goal(eid: str = "G1") -> Element:
    return Element(eid, ElementKind.GOAL, GOAL_TEXT)


def chain_case() -> AssuranceCase:
    case = create_case("c", "t", goal())
    case = add_element(case, Element("P1", ElementKind.PROPERTY_CLAIM, "claim"))
    case = add_element(case, Element("E1", ElementKind.EVIDENCE, "gate"))
    case = add_link(case, "G1", "P1")
    case = add_link(case, "P1", "E1")
    return case


# --- independent oracles -------------------------------------------------------


def oracle_reachable_evidence(case: AssuranceCase) -> list[str]:
    """Claims with no path to evidence, by iterated transitive closure."""
    reach = {eid: {to for frm, to in case.links if frm == eid} for eid in case.elements}
    changed = True
    while changed:
        changed = False
        for eid in reach:
            extra = set()
            for mid in reach[eid]:
                extra |= reach.get(mid, set())
            if not extra <= reach[eid]:
                reach[eid] |= extra
                changed = True
    out = []
    for eid, element in case.elements.items():
        if element.kind is not ElementKind.PROPERTY_CLAIM:
            continue
        if not any(
            mid in case.elements and case.elements[mid].kind is ElementKind.EVIDENCE
            for mid in reach[eid]
        ):
            out.append(eid)
    return sorted(out)


def oracle_has_cycle(case: AssuranceCase) -> bool:
    """Kahn's algorithm on the non-context subgraph."""
    nodes = {
        eid for eid, el in case.elements.items() if el.kind is not ElementKind.CONTEXT
    }
    edges = {
        (f, t)
        for f, t in case.links
        if f in nodes and t in nodes
    }
    indeg = {n: 0 for n in nodes}
    for _, t in edges:
        indeg[t] += 1
    queue = [n for n in nodes if indeg[n] == 0]
    seen = 0
    while queue:
        n = queue.pop()
        seen += 1
        for f, t in list(edges):
            if f != n:
                continue
            edges.discard((f, t))
            indeg[t] -= 1
            if indeg[t] == 0:
                queue.append(t)
    return seen != len(nodes)


# --- construction ----------------------------------------------------------------


def test_create_case_holds_only_root():
    case = create_case("fin-1", "Fair sentiment", goal())
    assert set(case.elements) == {"G1"}
    assert case.root == "G1"
    assert validate_case(case) == []


def test_create_case_rejects_non_goal_root():
    with pytest.raises(NonGoalRootError):
        create_case("c", "t", Element("E1", ElementKind.EVIDENCE, "not a goal"))


def test_create_case_accepts_empty_title():
    case = create_case("c", "", goal())
    assert case.title == ""


def test_add_element_and_duplicate():
    case = create_case("c", "t", goal())
    case = add_element(case, Element("S1", ElementKind.STRATEGY, "split the argument"))
    assert len(case.elements) == 2
    with pytest.raises(DuplicateIdError):
        add_element(case, goal())


def test_add_element_keeps_taxonomy():
    case = create_case("c", "t", goal())
    tag = TaxonomyTag(comp=ComponentKind.DATA, level=TaxonomyLevel.COMPONENT)
    case = add_element(case, Element("P1", ElementKind.PROPERTY_CLAIM, "claim", taxonomy=tag))
    assert case.elements["P1"].taxonomy == tag


def test_evidence_meta_only_on_evidence():
    meta_default = Element("E1", ElementKind.EVIDENCE, "gate").evidence_meta
    assert meta_default is not None
    from faircase.case import EvidenceMeta

    with pytest.raises(ValueError):
        Element("S1", ElementKind.STRATEGY, "s", evidence_meta=EvidenceMeta())


def test_add_link_allowed_kind():
    case = create_case("c", "t", goal())
    case = add_element(case, Element("S1", ElementKind.STRATEGY, "s"))
    case = add_link(case, "G1", "S1")
    assert ("G1", "S1") in case.links


def test_add_link_unknown_id():
    case = create_case("c", "t", goal())
    with pytest.raises(UnknownIdError):
        add_link(case, "G1", "S9")


def test_add_link_evidence_source_illegal():
    case = chain_case()
    with pytest.raises(IllegalLinkKindError):
        add_link(case, "E1", "P1")


def test_add_link_cycle_detected():
    case = create_case("c", "t", goal())
    case = add_element(case, Element("S1", ElementKind.STRATEGY, "s"))
    case = add_element(case, Element("P1", ElementKind.PROPERTY_CLAIM, "p"))
    case = add_link(case, "G1", "S1")
    case = add_link(case, "S1", "P1")
    with pytest.raises(CycleDetectedError):
        add_link(case, "P1", "G1")
    # DFS oracle agrees the attempted graph is cyclic.
    attempted = AssuranceCase(
        case_id=case.case_id,
        title=case.title,
        root=case.root,
        elements=case.elements,
        links=case.links | {("P1", "G1")},
    )
    assert oracle_has_cycle(attempted)


def test_add_link_claim_cycle_with_legal_kinds():
    case = create_case("c", "t", goal())
    case = add_element(case, Element("P1", ElementKind.PROPERTY_CLAIM, "p1"))
    case = add_element(case, Element("P2", ElementKind.PROPERTY_CLAIM, "p2"))
    case = add_link(case, "G1", "P1")
    case = add_link(case, "P1", "P2")
    with pytest.raises(CycleDetectedError):
        add_link(case, "P2", "P1")


# --- validation ------------------------------------------------------------------


def test_validate_toy_fixture_clean(toy_case):
    assert validate_case(toy_case) == []


def test_validate_dangling_link():
    case = chain_case()
    broken = AssuranceCase(
        case_id=case.case_id,
        title=case.title,
        root=case.root,
        elements=case.elements,
        links=case.links | {("P1", "E9")},
    )
    diags = validate_case(broken)
    assert [d.rule for d in diags] == ["UnknownId"]
    assert "E9" in diags[0].element_ids


def test_validate_goal_to_goal_link():
    case = create_case("c", "t", goal())
    case = add_element(case, Element("G2", ElementKind.GOAL, "second goal"))
    broken = AssuranceCase(
        case_id=case.case_id,
        title=case.title,
        root=case.root,
        elements=case.elements,
        links=frozenset({("G1", "G2")}),
    )
    assert [d.rule for d in validate_case(broken)] == ["IllegalLinkKind"]


def test_validate_missing_and_non_goal_root():
    case = create_case("c", "t", goal())
    missing = AssuranceCase("c", "t", "G9", case.elements, frozenset())
    assert [d.rule for d in validate_case(missing)] == ["MissingRoot"]
    non_goal = AssuranceCase(
        "c",
        "t",
        "E1",
        {"E1": Element("E1", ElementKind.EVIDENCE, "e")},
        frozenset(),
    )
    assert [d.rule for d in validate_case(non_goal)] == ["NonGoalRoot"]


def test_validate_empty_text():
    case = AssuranceCase(
        "c", "t", "G1", {"G1": Element("G1", ElementKind.GOAL, "  ")}, frozenset()
    )
    assert [d.rule for d in validate_case(case)] == ["EmptyText"]


def test_every_diagnostic_names_an_element(toy_case):
    broken = AssuranceCase(
        toy_case.case_id,
        toy_case.title,
        toy_case.root,
        toy_case.elements,
        toy_case.links | {("E1", "P1"), ("P9", "E1")},
    )
    diags = validate_case(broken)
    assert diags
    for diag in diags:
        assert diag.element_ids


# --- unsupported claims ------------------------------------------------------------


def test_unsupported_claims_linked_claim_not_listed():
    assert unsupported_claims(chain_case()) == []


def test_unsupported_claims_leaf_claim_listed():
    case = chain_case()
    case = add_element(case, Element("P2", ElementKind.PROPERTY_CLAIM, "leaf"))
    case = add_link(case, "G1", "P2")
    assert unsupported_claims(case) == ["P2"]


def test_unsupported_claims_transitive_chain():
    case = create_case("c", "t", goal())
    case = add_element(case, Element("P1", ElementKind.PROPERTY_CLAIM, "p1"))
    case = add_element(case, Element("P2", ElementKind.PROPERTY_CLAIM, "p2"))
    case = add_element(case, Element("E1", ElementKind.EVIDENCE, "e"))
    case = add_link(case, "G1", "P1")
    case = add_link(case, "P1", "P2")
    case = add_link(case, "P2", "E1")
    assert unsupported_claims(case) == []
    assert unsupported_claims(case) == oracle_reachable_evidence(case)


def test_unsupported_claims_toy_fixture(toy_case):
    assert unsupported_claims(toy_case) == ["P3"]
    assert unsupported_claims(toy_case) == oracle_reachable_evidence(toy_case)


def test_unsupported_claims_requires_valid_case():
    case = AssuranceCase("c", "t", "G9", {}, frozenset())
    with pytest.raises(InvalidCaseError):
        unsupported_claims(case)


# --- roll-up -------------------------------------------------------------------


def test_rollup_single_chain_all_supported():
    statuses = rollup_status(chain_case(), {"E1": EvidenceState.PASSING}).statuses
    assert {k: v for k, v in statuses.items()} == {
        "G1": ElementStatus.SUPPORTED,
        "P1": ElementStatus.SUPPORTED,
        "E1": ElementStatus.SUPPORTED,
    }


def test_rollup_failing_propagates_to_root():
    statuses = rollup_status(chain_case(), {"E1": EvidenceState.FAILING}).statuses
    assert set(statuses.values()) == {ElementStatus.FAILING}


def test_rollup_mixed_four_node_fixture():
    # Hand-enumerated: P1 has passing evidence, P2 has none, goal is an AND.
    case = chain_case()
    case = add_element(case, Element("P2", ElementKind.PROPERTY_CLAIM, "no evidence"))
    case = add_link(case, "G1", "P2")
    result = rollup_status(case, {"E1": EvidenceState.PASSING})
    assert result.statuses["P1"] is ElementStatus.SUPPORTED
    assert result.statuses["P2"] is ElementStatus.UNSUPPORTED
    assert result.statuses["G1"] is ElementStatus.UNSUPPORTED
    assert any(eid == "P2" for eid, _ in result.reasons)


def test_rollup_stale_and_missing_map_to_stale():
    case = chain_case()
    for state in (EvidenceState.MISSING, EvidenceState.STALE):
        result = rollup_status(case, {"E1": state})
        assert result.statuses["E1"] is ElementStatus.STALE
        assert result.statuses["P1"] is ElementStatus.UNSUPPORTED
        assert result.statuses["G1"] is ElementStatus.UNSUPPORTED


def test_rollup_claim_or_semantics():
    case = chain_case()
    case = add_element(case, Element("E2", ElementKind.EVIDENCE, "second gate"))
    case = add_link(case, "P1", "E2")
    result = rollup_status(
        case, {"E1": EvidenceState.PASSING, "E2": EvidenceState.STALE}
    )
    assert result.statuses["P1"] is ElementStatus.SUPPORTED
    result = rollup_status(
        case, {"E1": EvidenceState.PASSING, "E2": EvidenceState.FAILING}
    )
    assert result.statuses["P1"] is ElementStatus.FAILING


def test_rollup_context_not_evaluated(toy_case):
    result = rollup_status(
        toy_case, {"E1": EvidenceState.PASSING, "E2": EvidenceState.PASSING}
    )
    assert "C1" not in result.statuses
    assert set(result.statuses) == set(toy_case.elements) - {"C1"}


def test_rollup_incomplete_states():
    case = chain_case()
    with pytest.raises(IncompleteStatesError):
        rollup_status(case, {})
    with pytest.raises(IncompleteStatesError):
        rollup_status(case, {"E1": EvidenceState.PASSING, "E9": EvidenceState.PASSING})


def test_rollup_requires_valid_case():
    case = AssuranceCase("c", "t", "G9", {}, frozenset())
    with pytest.raises(InvalidCaseError):
        rollup_status(case, {})


_RANK = {
    ElementStatus.FAILING: 0,
    ElementStatus.UNSUPPORTED: 1,
    ElementStatus.STALE: 1,
    ElementStatus.SUPPORTED: 2,
}


def test_rollup_monotone_under_single_upgrade():
    rng = random.Random(7)
    for _ in range(40):
        case = make_case(rng, max_nodes=25)
        states = make_evidence_states(rng, case)
        failing = [e for e, s in states.items() if s is EvidenceState.FAILING]
        if not failing:
            continue
        before = rollup_status(case, states).statuses
        upgraded = dict(states)
        upgraded[rng.choice(failing)] = EvidenceState.PASSING
        after = rollup_status(case, upgraded).statuses
        for eid in before:
            assert _RANK[after[eid]] >= _RANK[before[eid]], (
                f"{eid} downgraded {before[eid]} -> {after[eid]}"
            )


# --- serialization -----------------------------------------------------------


def test_serialize_parse_roundtrip(toy_case):
    text = serialize_case(toy_case)
    parsed, diags = parse_case(text)
    assert diags == []
    assert parsed == toy_case


def test_serialize_deterministic_and_fixpoint(toy_case):
    text = serialize_case(toy_case)
    assert serialize_case(toy_case) == text
    parsed, _ = parse_case(text)
    assert serialize_case(parsed) == text


def test_serialize_contains_all_kinds(toy_case):
    text = serialize_case(toy_case)
    for kind in ("goal", "context", "property_claim", "strategy", "evidence"):
        assert f"kind: {kind}" in text


def test_parse_missing_root_key():
    with pytest.raises(SchemaError) as err:
        parse_case("case_id: c\nelements: []\n")
    assert err.value.path == "root"


def test_parse_unknown_kind_lists_allowed():
    doc = """
case_id: c
root: G1
elements:
  - {id: G1, kind: Assumption, text: not a kind}
"""
    with pytest.raises(SchemaError) as err:
        parse_case(doc)
    message = str(err.value)
    for kind in ("goal", "context", "property_claim", "strategy", "evidence"):
        assert kind in message


def test_parse_duplicate_id():
    doc = """
case_id: c
root: G1
elements:
  - {id: G1, kind: goal, text: a}
  - {id: G1, kind: goal, text: b}
"""
    with pytest.raises(SchemaError):
        parse_case(doc)


def test_parse_reports_structural_diagnostics():
    doc = """
case_id: c
root: G1
elements:
  - {id: G1, kind: goal, text: a}
  - {id: G2, kind: goal, text: b}
links:
  - {from: G1, to: G2}
"""
    case, diags = parse_case(doc)
    assert [d.rule for d in diags] == ["IllegalLinkKind"]
    assert len(case.elements) == 2


# --- diagram -------------------------------------------------------------------


def _node_lines(diagram: str) -> list[str]:
    return [line for line in diagram.splitlines() if '["' in line]


def _edge_lines(diagram: str) -> list[str]:
    return [line for line in diagram.splitlines() if "-->" in line or "-.-" in line]


def test_diagram_single_element():
    diagram = render_diagram(create_case("c", "t", goal()))
    assert diagram.startswith("graph TD")
    assert len(_node_lines(diagram)) == 1
    assert len(_edge_lines(diagram)) == 0


def test_diagram_counts_match_fixture(toy_case):
    diagram = render_diagram(toy_case)
    assert len(_node_lines(diagram)) == len(toy_case.elements)
    assert len(_edge_lines(diagram)) == len(toy_case.links)


def test_diagram_truncates_labels():
    case = create_case("c", "t", Element("G1", ElementKind.GOAL, "x" * 200))
    node = _node_lines(render_diagram(case))[0]
    label = node.split('"')[1]
    assert len(label) <= 64  # id prefix + 60-char text budget


def test_diagram_all_failing_status():
    case = chain_case()
    status = rollup_status(case, {"E1": EvidenceState.FAILING})
    diagram = render_diagram(case, status)
    for line in _node_lines(diagram):
        assert ":::failing" in line


def test_diagram_requires_valid_case():
    case = AssuranceCase("c", "t", "G9", {}, frozenset())
    with pytest.raises(InvalidCaseError):
        render_diagram(case)


# --- randomized structural properties -------------------------------------------


def test_random_cases_validate_and_match_oracles():
    rng = random.Random(13)
    for _ in range(60):
        case = make_case(rng, max_nodes=30)
        assert validate_case(case) == []
        assert not oracle_has_cycle(case)
        assert unsupported_claims(case) == oracle_reachable_evidence(case)


def test_random_link_sequences_stay_acyclic():
    rng = random.Random(29)
    for _ in range(20):
        case = make_case(rng, max_nodes=15)
        ids = sorted(case.elements)
        for _ in range(30):
            frm, to = rng.choice(ids), rng.choice(ids)
            try:
                case = add_link(case, frm, to)
            except (IllegalLinkKindError, CycleDetectedError, UnknownIdError):
                continue
        assert not oracle_has_cycle(case)
        assert validate_case(case) == []
