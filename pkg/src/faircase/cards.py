"""Model, data, and use case card schemas with parse/serialize support.

Model cards carry nine fixed sections; everything except the structured
quantitative-analysis entries is treated as opaque field/value text. Data
cards use a small fixed vocabulary with unknown keys preserved under
``extensions``. Use case cards pair an actor/use-case canvas with a
descriptive table.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Mapping

from .errors import Diagnostic, SchemaError
from .yamlio import (
    dump_yaml,
    load_yaml,
    require_list,
    require_mapping,
    require_number,
    require_str,
    sorted_deep,
)


class CardKind(Enum):
    MODEL = "model"
    DATA = "data"
    USE_CASE = "use_case"


MODEL_CARD_SECTIONS = (
    "model_details",
    "intended_use",
    "factors",
    "metrics",
    "evaluation_data",
    "training_data",
    "quantitative_analyses",
    "ethical_considerations",
    "caveats_recommendations",
)

DATA_CARD_VOCABULARY = (
    "funding_sources",
    "data_subjects",
    "representation",
    "collection_process",
    "geographies",
    "intended_uses",
    "unintended_outcomes",
)


@dataclass(frozen=True)
class CardField:
    field: str
    value: str


@dataclass(frozen=True)
class QuantEntry:
    """Structured metric entry in a model card's quantitative analyses."""

    metric_name: str
    value: float
    group: str | None = None
    provenance: str | None = None


@dataclass(frozen=True)
class ModelCard:
    sections: Mapping[str, tuple[CardField, ...]]
    quantitative_analyses: tuple[QuantEntry, ...] = ()
    extra_sections: Mapping[str, Any] = field(default_factory=dict)
    extras: Mapping[str, Any] = field(default_factory=dict)


@dataclass(frozen=True)
class DataCard:
    sections: Mapping[str, str | tuple[str, ...]]
    extensions: Mapping[str, Any] = field(default_factory=dict)


@dataclass(frozen=True)
class Relationship:
    actor: str
    use_case: str


@dataclass(frozen=True)
class Canvas:
    actors: tuple[str, ...] = ()
    use_cases: tuple[str, ...] = ()
    relationships: tuple[Relationship, ...] = ()


@dataclass(frozen=True)
class UseCaseTable:
    intended_purpose: str = ""
    product_type: str = ""
    safety_component: bool = False
    application_areas: tuple[str, ...] = ()
    other: tuple[CardField, ...] = ()


@dataclass(frozen=True)
class UseCaseCard:
    canvas: Canvas = Canvas()
    table: UseCaseTable = UseCaseTable()


Card = ModelCard | DataCard | UseCaseCard


# --- model card --------------------------------------------------------------


def _parse_card_fields(raw: object, path: str) -> tuple[CardField, ...]:
    entries = []
    for i, raw_entry in enumerate(require_list(raw if raw is not None else [], path)):
        entry = require_mapping(raw_entry, f"{path}/{i}")
        for key in ("field", "value"):
            if key not in entry:
                raise SchemaError(f"{path}/{i}/{key}", "missing")
        entries.append(
            CardField(
                field=require_str(entry["field"], f"{path}/{i}/field"),
                value=require_str(entry["value"], f"{path}/{i}/value"),
            )
        )
    return tuple(entries)


def _parse_quant_entries(raw: object, path: str) -> tuple[QuantEntry, ...]:
    entries = []
    for i, raw_entry in enumerate(require_list(raw if raw is not None else [], path)):
        entry = require_mapping(raw_entry, f"{path}/{i}")
        if "metric_name" not in entry:
            raise SchemaError(f"{path}/{i}/metric_name", "missing")
        if "value" not in entry:
            raise SchemaError(f"{path}/{i}/value", "missing")
        group = entry.get("group")
        provenance = entry.get("provenance")
        entries.append(
            QuantEntry(
                metric_name=require_str(
                    entry["metric_name"], f"{path}/{i}/metric_name", allow_empty=False
                ),
                value=require_number(entry["value"], f"{path}/{i}/value"),
                group=require_str(group, f"{path}/{i}/group") if group is not None else None,
                provenance=require_str(provenance, f"{path}/{i}/provenance")
                if provenance is not None
                else None,
            )
        )
    return tuple(entries)


def parse_model_card(text: str) -> tuple[ModelCard, list[Diagnostic]]:
    doc = load_yaml(text)
    mapping = require_mapping(doc, "")
    if "sections" not in mapping or mapping["sections"] is None:
        raise SchemaError("sections", "missing required key")
    raw_sections = require_mapping(mapping["sections"], "sections")
    diags: list[Diagnostic] = []

    sections: dict[str, tuple[CardField, ...]] = {}
    quantitative: tuple[QuantEntry, ...] = ()
    for name in MODEL_CARD_SECTIONS:
        if name not in raw_sections or raw_sections[name] is None:
            diags.append(
                Diagnostic(
                    "MissingSection",
                    f"model card section {name!r} absent; instantiated empty",
                    path=f"sections/{name}",
                )
            )
            if name != "quantitative_analyses":
                sections[name] = ()
            continue
        if name == "quantitative_analyses":
            quantitative = _parse_quant_entries(raw_sections[name], f"sections/{name}")
        else:
            sections[name] = _parse_card_fields(raw_sections[name], f"sections/{name}")

    extra_sections = {k: raw_sections[k] for k in raw_sections if k not in MODEL_CARD_SECTIONS}
    for key in sorted(extra_sections):
        diags.append(
            Diagnostic(
                "UnknownField", f"unknown section {key!r} preserved", path=f"sections/{key}"
            )
        )
    extras = {k: mapping[k] for k in mapping if k != "sections"}
    for key in sorted(extras):
        diags.append(Diagnostic("UnknownField", f"unknown top-level key {key!r} preserved", path=key))

    card = ModelCard(
        sections=sections,
        quantitative_analyses=quantitative,
        extra_sections=extra_sections,
        extras=extras,
    )
    return card, diags


def quant_to_plain(entry: QuantEntry) -> dict:
    out: dict = {"metric_name": entry.metric_name, "value": entry.value}
    if entry.group is not None:
        out["group"] = entry.group
    if entry.provenance is not None:
        out["provenance"] = entry.provenance
    return out


def model_card_to_plain(card: ModelCard) -> dict:
    sections: dict = {}
    for name in MODEL_CARD_SECTIONS:
        if name == "quantitative_analyses":
            sections[name] = [quant_to_plain(e) for e in card.quantitative_analyses]
        else:
            sections[name] = [
                {"field": f.field, "value": f.value} for f in card.sections.get(name, ())
            ]
    for key in sorted(card.extra_sections):
        sections[key] = card.extra_sections[key]
    doc: dict = {"sections": sections}
    for key in sorted(card.extras):
        doc[key] = card.extras[key]
    return doc


# --- data card ---------------------------------------------------------------


def _parse_text_or_list(raw: object, path: str) -> str | tuple[str, ...]:
    if isinstance(raw, str):
        return raw
    if isinstance(raw, list):
        return tuple(require_str(v, f"{path}/{i}") for i, v in enumerate(raw))
    raise SchemaError(path, f"expected text or list, got {type(raw).__name__}")


def parse_data_card(text: str) -> tuple[DataCard, list[Diagnostic]]:
    doc = load_yaml(text)
    mapping = require_mapping(doc, "")
    if "sections" not in mapping or mapping["sections"] is None:
        raise SchemaError("sections", "missing required key")
    raw_sections = require_mapping(mapping["sections"], "sections")
    diags: list[Diagnostic] = []

    sections: dict[str, str | tuple[str, ...]] = {}
    for name in DATA_CARD_VOCABULARY:
        if name not in raw_sections or raw_sections[name] is None:
            diags.append(
                Diagnostic(
                    "MissingSection",
                    f"data card section {name!r} absent; instantiated empty",
                    path=f"sections/{name}",
                )
            )
            sections[name] = ""
            continue
        sections[name] = _parse_text_or_list(raw_sections[name], f"sections/{name}")

    extensions = dict(require_mapping(mapping.get("extensions") or {}, "extensions"))
    for key in sorted(k for k in raw_sections if k not in DATA_CARD_VOCABULARY):
        extensions[key] = raw_sections[key]
        diags.append(
            Diagnostic(
                "UnknownField",
                f"unknown section {key!r} moved under extensions",
                path=f"sections/{key}",
            )
        )
    return DataCard(sections=sections, extensions=extensions), diags


def data_card_to_plain(card: DataCard) -> dict:
    sections: dict = {}
    for name in DATA_CARD_VOCABULARY:
        value = card.sections.get(name, "")
        sections[name] = list(value) if isinstance(value, tuple) else value
    doc: dict = {"sections": sections}
    if card.extensions:
        doc["extensions"] = {k: card.extensions[k] for k in sorted(card.extensions)}
    return doc


# --- use case card -----------------------------------------------------------


def parse_use_case_card(text: str) -> tuple[UseCaseCard, list[Diagnostic]]:
    doc = load_yaml(text)
    mapping = require_mapping(doc, "")
    diags: list[Diagnostic] = []

    canvas = Canvas()
    if mapping.get("canvas") is not None:
        raw = require_mapping(mapping["canvas"], "canvas")
        actors = tuple(
            require_str(a, f"canvas/actors/{i}")
            for i, a in enumerate(require_list(raw.get("actors") or [], "canvas/actors"))
        )
        use_cases = tuple(
            require_str(u, f"canvas/use_cases/{i}")
            for i, u in enumerate(require_list(raw.get("use_cases") or [], "canvas/use_cases"))
        )
        relationships = []
        for i, raw_rel in enumerate(
            require_list(raw.get("relationships") or [], "canvas/relationships")
        ):
            rel = require_mapping(raw_rel, f"canvas/relationships/{i}")
            for key in ("actor", "use_case"):
                if key not in rel:
                    raise SchemaError(f"canvas/relationships/{i}/{key}", "missing")
            actor = require_str(rel["actor"], f"canvas/relationships/{i}/actor")
            use_case = require_str(rel["use_case"], f"canvas/relationships/{i}/use_case")
            if actor not in actors or use_case not in use_cases:
                raise SchemaError(
                    f"canvas/relationships/{i}",
                    f"relationship ({actor!r}, {use_case!r}) references undeclared endpoints",
                )
            relationships.append(Relationship(actor=actor, use_case=use_case))
        canvas = Canvas(actors=actors, use_cases=use_cases, relationships=tuple(relationships))
    else:
        diags.append(Diagnostic("MissingSection", "canvas absent", path="canvas"))

    table = UseCaseTable()
    if mapping.get("table") is not None:
        raw = require_mapping(mapping["table"], "table")
        safety = raw.get("safety_component", False)
        if not isinstance(safety, bool):
            raise SchemaError("table/safety_component", "expected boolean")
        table = UseCaseTable(
            intended_purpose=require_str(raw.get("intended_purpose") or "", "table/intended_purpose"),
            product_type=require_str(raw.get("product_type") or "", "table/product_type"),
            safety_component=safety,
            application_areas=tuple(
                require_str(a, f"table/application_areas/{i}")
                for i, a in enumerate(
                    require_list(raw.get("application_areas") or [], "table/application_areas")
                )
            ),
            other=_parse_card_fields(raw.get("other"), "table/other"),
        )
    else:
        diags.append(Diagnostic("MissingSection", "table absent", path="table"))

    return UseCaseCard(canvas=canvas, table=table), diags


def use_case_card_to_plain(card: UseCaseCard) -> dict:
    return {
        "canvas": {
            "actors": list(card.canvas.actors),
            "use_cases": list(card.canvas.use_cases),
            "relationships": [
                {"actor": r.actor, "use_case": r.use_case} for r in card.canvas.relationships
            ],
        },
        "table": {
            "intended_purpose": card.table.intended_purpose,
            "product_type": card.table.product_type,
            "safety_component": card.table.safety_component,
            "application_areas": list(card.table.application_areas),
            "other": [{"field": f.field, "value": f.value} for f in card.table.other],
        },
    }


# --- shared front door ---------------------------------------------------------

_PARSERS = {
    CardKind.MODEL: parse_model_card,
    CardKind.DATA: parse_data_card,
    CardKind.USE_CASE: parse_use_case_card,
}


def parse_card(kind: CardKind | str, text: str) -> tuple[Card, list[Diagnostic]]:
    kind = CardKind(kind) if isinstance(kind, str) else kind
    return _PARSERS[kind](text)


def card_to_plain(card: Card) -> dict:
    if isinstance(card, ModelCard):
        return model_card_to_plain(card)
    if isinstance(card, DataCard):
        return data_card_to_plain(card)
    return use_case_card_to_plain(card)


def serialize_card(card: Card) -> str:
    """Deterministic YAML: canonical section order, sorted keys within sections."""
    doc = card_to_plain(card)
    out: dict = {}
    for key, value in doc.items():
        if isinstance(value, dict):
            out[key] = {k: sorted_deep(v) for k, v in value.items()}
        else:
            out[key] = sorted_deep(value)
    return dump_yaml(out)
