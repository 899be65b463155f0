"""Shared fixtures, random generators, and independent oracles."""

from __future__ import annotations

import random
import time
from datetime import datetime, timedelta, timezone
from pathlib import Path

import pytest

from faircase.case import (
    AssuranceCase,
    Element,
    ElementKind,
    EvidenceState,
    parse_case,
)
from faircase.fairlog import (
    DataProfile,
    FairnessLog,
    GeneralInfo,
    MetricGroup,
    ModelInfo,
    SampleInfo,
    Variable,
    VariableKind,
)
from faircase.metrics import BiasMetric, ConfusionCounts, PredictionRecord
from faircase.raid import Origin, RaidKind, RaidRecord, Severity

FIXTURES = Path(__file__).parent / "fixtures"

_SESSION_START = time.monotonic()


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    elapsed = time.monotonic() - _SESSION_START
    verdict = "PASS" if elapsed < 60 else "FAIL"
    terminalreporter.write_line(
        f"ACCEPTANCE 7 {verdict}: full suite ran offline in {elapsed:.1f}s (budget 60s)"
    )


@pytest.fixture
def toy_case() -> AssuranceCase:
    case, diags = parse_case((FIXTURES / "toy-case.yaml").read_text())
    assert diags == []
    return case


@pytest.fixture
def finance_files(tmp_path: Path) -> dict[str, Path]:
    """Copies of the finance walkthrough fixtures inside a scratch directory."""
    out = {}
    for name in ("finance-case.yaml", "finance-log.yaml", "finance-bindings.yaml", "finance-card.yaml"):
        target = tmp_path / name
        target.write_text((FIXTURES / name).read_text())
        out[name.removesuffix(".yaml").replace("finance-", "")] = target
    out["dir"] = tmp_path
    return out


# --- random generators --------------------------------------------------------


def make_records(rng: random.Random, n_groups: int | None = None, max_records: int = 1000):
    """Random prediction records; every group gets all four confusion cells."""
    n_groups = n_groups or rng.randint(2, 4)
    groups = [f"g{i}" for i in range(n_groups)]
    records = []
    for group in groups:
        # One record per cell keeps every denominator nonzero.
        records += [
            PredictionRecord(group, 1, 1),
            PredictionRecord(group, 1, 0),
            PredictionRecord(group, 0, 1),
            PredictionRecord(group, 0, 0),
        ]
    extra = rng.randint(0, max_records - len(records))
    for _ in range(extra):
        records.append(
            PredictionRecord(rng.choice(groups), rng.randint(0, 1), rng.randint(0, 1))
        )
    rng.shuffle(records)
    return records


_KIND_POOL = (
    ElementKind.STRATEGY,
    ElementKind.PROPERTY_CLAIM,
    ElementKind.PROPERTY_CLAIM,
    ElementKind.EVIDENCE,
    ElementKind.CONTEXT,
)

_LEGAL_TARGETS = {
    ElementKind.GOAL: (ElementKind.STRATEGY, ElementKind.PROPERTY_CLAIM),
    ElementKind.STRATEGY: (ElementKind.PROPERTY_CLAIM,),
    ElementKind.PROPERTY_CLAIM: (ElementKind.PROPERTY_CLAIM, ElementKind.EVIDENCE),
    ElementKind.CONTEXT: (
        ElementKind.GOAL,
        ElementKind.STRATEGY,
        ElementKind.PROPERTY_CLAIM,
    ),
    ElementKind.EVIDENCE: (),
}


def make_case(rng: random.Random, max_nodes: int = 50) -> AssuranceCase:
    """Random structurally valid case: links only point to later-ranked nodes."""
    n = rng.randint(2, max_nodes)
    elements = {"G1": Element("G1", ElementKind.GOAL, "root goal")}
    order = ["G1"]
    for i in range(1, n):
        kind = rng.choice(_KIND_POOL)
        eid = f"N{i}"
        elements[eid] = Element(eid, kind, f"element {i} ({kind.value})")
        order.append(eid)

    links: set[tuple[str, str]] = set()
    for i, frm in enumerate(order):
        frm_kind = elements[frm].kind
        if frm_kind is ElementKind.CONTEXT:
            # Context may annotate anything legal, anywhere in the order.
            candidates = [
                t
                for t in order
                if t != frm and elements[t].kind in _LEGAL_TARGETS[ElementKind.CONTEXT]
            ]
        else:
            candidates = [
                t for t in order[i + 1 :] if elements[t].kind in _LEGAL_TARGETS[frm_kind]
            ]
        rng.shuffle(candidates)
        for target in candidates[: rng.randint(0, 3)]:
            links.add((frm, target))
    return AssuranceCase(
        case_id=f"rand-{rng.randint(0, 10**6)}",
        title="randomized case",
        root="G1",
        elements=elements,
        links=frozenset(links),
    )


def make_evidence_states(rng: random.Random, case: AssuranceCase):
    states = (
        EvidenceState.PASSING,
        EvidenceState.FAILING,
        EvidenceState.MISSING,
        EvidenceState.STALE,
    )
    return {eid: rng.choice(states) for eid in case.evidence_ids()}


_WORDS = ("alpha", "beta", "gamma", "delta", "north", "south", "sample", "news", "tone")


def _word(rng: random.Random) -> str:
    return rng.choice(_WORDS) + str(rng.randint(0, 99))


def make_log(rng: random.Random) -> FairnessLog:
    """Random valid fairness log for round-trip properties."""
    n_groups = rng.randint(0, 3)
    groups = []
    for gi in range(n_groups):
        metrics = []
        for mi in range(rng.randint(1, 3)):
            thresholds = rng.choice(
                [None, round(rng.uniform(0, 1), 3), (round(rng.uniform(0, 0.4), 3), round(rng.uniform(0.5, 1.5), 3))]
            )
            metrics.append(
                BiasMetric(
                    name=f"metric_{gi}_{mi}",
                    value=round(rng.uniform(0, 1), 6),
                    description=rng.choice(["", "a measured value"]),
                    thresholds=thresholds,
                    bigger_is_better=rng.random() < 0.5,
                    notes=rng.choice([None, _word(rng)]),
                    sg=rng.choice([None, _word(rng)]),
                )
            )
        groups.append(MetricGroup(group_name=f"group{gi}", metrics=tuple(metrics)))
    variables = tuple(
        Variable(
            name=f"var{i}",
            kind=rng.choice((VariableKind.NOMINAL, VariableKind.CONTINUOUS)),
            summary=rng.choice([None, _word(rng)]),
        )
        for i in range(rng.randint(0, 3))
    )
    risks = ()
    if rng.random() < 0.4:
        risks = (
            RaidRecord(
                kind=rng.choice(tuple(RaidKind)),
                title=_word(rng),
                description=rng.choice(["", "declared in the log"]),
                severity=rng.choice(tuple(Severity)),
                linked_elements=tuple(f"P{i}" for i in range(rng.randint(0, 2))),
                labels=tuple(sorted({_word(rng) for _ in range(rng.randint(0, 2))})),
                origin=Origin(experiment_id=rng.choice([None, "exp-0"])),
            ),
        )
    return FairnessLog(
        general=GeneralInfo(
            experiment_id=f"exp-{rng.randint(0, 999)}",
            title=_word(rng),
            timestamp=datetime(2026, 1, 1, tzinfo=timezone.utc)
            + timedelta(minutes=rng.randint(0, 500000)),
            authors=tuple(_word(rng) for _ in range(rng.randint(0, 2))),
            description=rng.choice(["", "randomized log"]),
        ),
        data=DataProfile(
            sample=SampleInfo(
                name=_word(rng),
                size=rng.randint(0, 10**6),
                source=_word(rng),
                notes=rng.choice([None, "unicode name: Ülkü 数据"]),
            ),
            variables=variables,
            sensitive_characteristics=tuple(v.name for v in variables[:1]),
        ),
        model=ModelInfo(
            name=_word(rng),
            version=rng.choice([None, "1.0", "2.3-rc1"]),
            sample_data=ConfusionCounts(
                tps=rng.randint(0, 500),
                fps=rng.randint(0, 500),
                tns=rng.randint(0, 500),
                fns=rng.randint(0, 500),
            ),
        ),
        groups=tuple(groups),
        risks=risks,
    )


def make_tree(rng: random.Random, depth: int = 3):
    """Random plain YAML tree for diff/apply properties."""
    if depth == 0 or rng.random() < 0.3:
        return rng.choice(
            [rng.randint(0, 100), round(rng.uniform(0, 1), 4), _word(rng), True, False, None]
        )
    if rng.random() < 0.5:
        return {
            _word(rng): make_tree(rng, depth - 1) for _ in range(rng.randint(1, 4))
        }
    return [make_tree(rng, depth - 1) for _ in range(rng.randint(0, 4))]


def mutate_tree(rng: random.Random, tree):
    """Return a mutated deep copy: scalar edits, inserts, and deletions."""
    import copy

    result = copy.deepcopy(tree)

    def mutate(node):
        if isinstance(node, dict) and node:
            key = rng.choice(sorted(node))
            action = rng.random()
            if action < 0.3:
                del node[key]
            elif action < 0.5:
                node[_word(rng)] = make_tree(rng, 1)
            else:
                node[key] = mutate(node[key])
            return node
        if isinstance(node, list) and node:
            action = rng.random()
            if action < 0.3:
                node.pop()
            elif action < 0.5:
                node.append(make_tree(rng, 1))
            else:
                i = rng.randrange(len(node))
                node[i] = mutate(node[i])
            return node
        return make_tree(rng, 1)

    for _ in range(rng.randint(1, 4)):
        result = mutate(result)
    return result
