"""The per-experiment fairness log: schema, parser, and serializer.

A log records the experimental context, a data profile with sensitive
characteristics, the model identity with its confusion counts, and bias
metrics grouped by sensitive-attribute value. Serialization is
byte-deterministic: fixed section order, sorted keys within sections.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field, replace
from datetime import datetime, timezone
from enum import Enum
from typing import Any, Mapping

from .errors import Diagnostic, SchemaError
from .metrics import BiasMetric, ConfusionCounts
from .raid import RaidRecord, parse_raid, raid_to_plain
from .yamlio import (
    dump_yaml,
    format_instant,
    load_yaml,
    parse_instant,
    require_int,
    require_list,
    require_mapping,
    require_number,
    require_str,
    sorted_deep,
)

SCHEMA_VERSION = 1

_EXPERIMENT_ID_RE = re.compile(r"^[A-Za-z0-9][A-Za-z0-9._-]*$")

EPOCH = datetime(1970, 1, 1, tzinfo=timezone.utc)


class VariableKind(Enum):
    NOMINAL = "nominal"
    CONTINUOUS = "continuous"


@dataclass(frozen=True)
class GeneralInfo:
    experiment_id: str
    title: str = ""
    timestamp: datetime = EPOCH
    authors: tuple[str, ...] = ()
    description: str = ""


@dataclass(frozen=True)
class SampleInfo:
    name: str = ""
    size: int = 0
    source: str = ""
    notes: str | None = None


@dataclass(frozen=True)
class Variable:
    name: str
    kind: VariableKind
    summary: str | None = None


@dataclass(frozen=True)
class DataProfile:
    sample: SampleInfo = SampleInfo()
    variables: tuple[Variable, ...] = ()
    sensitive_characteristics: tuple[str, ...] = ()


@dataclass(frozen=True)
class ModelInfo:
    name: str
    version: str | None = None
    sample_data: ConfusionCounts = ConfusionCounts(0, 0, 0, 0)


@dataclass(frozen=True)
class MetricGroup:
    group_name: str
    metrics: tuple[BiasMetric, ...] = ()


@dataclass(frozen=True)
class FairnessLog:
    """One experiment's recorded fairness metadata."""

    general: GeneralInfo
    data: DataProfile = DataProfile()
    model: ModelInfo = ModelInfo(name="")
    groups: tuple[MetricGroup, ...] = ()
    risks: tuple[RaidRecord, ...] = ()
    extras: Mapping[str, Any] = field(default_factory=dict)


# --- parsing -----------------------------------------------------------------


def parse_bias_metric(raw: object, path: str) -> tuple[BiasMetric, list[Diagnostic]]:
    """Parse one metric entry; also used to read metrics at evidence paths."""
    mapping = require_mapping(raw, path)
    diags: list[Diagnostic] = []
    if "name" not in mapping:
        raise SchemaError(f"{path}/name", "missing")
    name = require_str(mapping["name"], f"{path}/name", allow_empty=False)
    if "value" not in mapping:
        raise SchemaError(f"{path}/value", "missing")
    value = require_number(mapping["value"], f"{path}/value")

    thresholds: float | tuple[float, float] | None = None
    raw_thresholds = mapping.get("thresholds")
    if raw_thresholds is not None:
        if isinstance(raw_thresholds, list):
            if len(raw_thresholds) != 2:
                raise SchemaError(f"{path}/thresholds", "interval must be [lo, hi]")
            lo = require_number(raw_thresholds[0], f"{path}/thresholds/0")
            hi = require_number(raw_thresholds[1], f"{path}/thresholds/1")
            if lo > hi:
                raise SchemaError(f"{path}/thresholds", f"requires lo <= hi, got [{lo}, {hi}]")
            thresholds = (lo, hi)
        else:
            thresholds = require_number(raw_thresholds, f"{path}/thresholds")

    bigger = mapping.get("bigger_is_better")
    if bigger is None:
        bigger = False
        if isinstance(thresholds, float):
            diags.append(
                Diagnostic(
                    "MissingDirection",
                    "scalar thresholds without bigger_is_better; assuming smaller is better",
                    path=f"{path}/bigger_is_better",
                )
            )
    elif not isinstance(bigger, bool):
        raise SchemaError(f"{path}/bigger_is_better", "expected boolean")

    notes = mapping.get("notes")
    sg = mapping.get("sg")
    metric = BiasMetric(
        name=name,
        value=value,
        description=require_str(mapping.get("description") or "", f"{path}/description"),
        thresholds=thresholds,
        bigger_is_better=bigger,
        notes=require_str(notes, f"{path}/notes") if notes is not None else None,
        sg=require_str(sg, f"{path}/sg") if sg is not None else None,
    )
    return metric, diags


def _parse_general(raw: object, diags: list[Diagnostic]) -> GeneralInfo:
    mapping = require_mapping(raw, "general")
    if "experiment_id" not in mapping:
        raise SchemaError("general/experiment_id", "missing required key")
    experiment_id = require_str(
        mapping["experiment_id"], "general/experiment_id", allow_empty=False
    )
    if not _EXPERIMENT_ID_RE.match(experiment_id):
        raise SchemaError(
            "general/experiment_id",
            f"{experiment_id!r} is not filesystem-safe ([A-Za-z0-9._-] only)",
        )
    if "timestamp" in mapping and mapping["timestamp"] is not None:
        timestamp = parse_instant(mapping["timestamp"], "general/timestamp")
    else:
        timestamp = EPOCH
        diags.append(
            Diagnostic(
                "MissingField",
                "general/timestamp absent; treating the log as dated 1970-01-01",
                path="general/timestamp",
            )
        )
    authors = tuple(
        require_str(a, f"general/authors/{i}")
        for i, a in enumerate(require_list(mapping.get("authors") or [], "general/authors"))
    )
    return GeneralInfo(
        experiment_id=experiment_id,
        title=require_str(mapping.get("title") or "", "general/title"),
        timestamp=timestamp,
        authors=authors,
        description=require_str(mapping.get("description") or "", "general/description"),
    )


def _parse_data(raw: object, diags: list[Diagnostic]) -> DataProfile:
    if raw is None:
        diags.append(Diagnostic("MissingSection", "data section absent", path="data"))
        return DataProfile()
    mapping = require_mapping(raw, "data")

    sample = SampleInfo()
    if mapping.get("sample") is not None:
        s = require_mapping(mapping["sample"], "data/sample")
        notes = s.get("notes")
        sample = SampleInfo(
            name=require_str(s.get("name") or "", "data/sample/name"),
            size=require_int(s.get("size", 0), "data/sample/size", minimum=0),
            source=require_str(s.get("source") or "", "data/sample/source"),
            notes=require_str(notes, "data/sample/notes") if notes is not None else None,
        )
    else:
        diags.append(Diagnostic("MissingSection", "data/sample absent", path="data/sample"))

    variables = []
    for i, raw_var in enumerate(require_list(mapping.get("variables") or [], "data/variables")):
        var = require_mapping(raw_var, f"data/variables/{i}")
        if "name" not in var:
            raise SchemaError(f"data/variables/{i}/name", "missing")
        kind_name = require_str(var.get("kind") or "", f"data/variables/{i}/kind")
        try:
            kind = VariableKind(kind_name)
        except ValueError:
            allowed = ", ".join(k.value for k in VariableKind)
            raise SchemaError(
                f"data/variables/{i}/kind",
                f"unknown kind {kind_name!r}; expected one of: {allowed}",
            )
        summary = var.get("summary")
        variables.append(
            Variable(
                name=require_str(var["name"], f"data/variables/{i}/name", allow_empty=False),
                kind=kind,
                summary=require_str(summary, f"data/variables/{i}/summary")
                if summary is not None
                else None,
            )
        )

    sensitive = tuple(
        require_str(c, f"data/sensitive_characteristics/{i}")
        for i, c in enumerate(
            require_list(
                mapping.get("sensitive_characteristics") or [], "data/sensitive_characteristics"
            )
        )
    )
    if variables:
        known = {v.name for v in variables}
        for characteristic in sensitive:
            if characteristic not in known:
                diags.append(
                    Diagnostic(
                        "UnknownSensitiveCharacteristic",
                        f"{characteristic!r} is not a declared variable",
                        path="data/sensitive_characteristics",
                    )
                )
    return DataProfile(
        sample=sample, variables=tuple(variables), sensitive_characteristics=sensitive
    )


def _parse_model(raw: object, diags: list[Diagnostic]) -> ModelInfo:
    mapping = require_mapping(raw, "model")
    if "name" not in mapping:
        raise SchemaError("model/name", "missing required key")
    name = require_str(mapping["name"], "model/name", allow_empty=False)
    version = mapping.get("version")
    counts = ConfusionCounts(0, 0, 0, 0)
    if mapping.get("sample_data") is not None:
        sd = require_mapping(mapping["sample_data"], "model/sample_data")
        counts = ConfusionCounts(
            tps=require_int(sd.get("tps", 0), "model/sample_data/tps", minimum=0),
            fps=require_int(sd.get("fps", 0), "model/sample_data/fps", minimum=0),
            tns=require_int(sd.get("tns", 0), "model/sample_data/tns", minimum=0),
            fns=require_int(sd.get("fns", 0), "model/sample_data/fns", minimum=0),
        )
    else:
        diags.append(
            Diagnostic("MissingSection", "model/sample_data absent", path="model/sample_data")
        )
    return ModelInfo(
        name=name,
        version=str(version) if version is not None else None,
        sample_data=counts,
    )


def _parse_groups(raw: object, diags: list[Diagnostic]) -> tuple[MetricGroup, ...]:
    if raw is None:
        diags.append(
            Diagnostic("MissingSection", "bias_metrics section absent", path="bias_metrics")
        )
        return ()
    mapping = require_mapping(raw, "bias_metrics")
    groups: list[MetricGroup] = []
    seen: set[str] = set()
    for i, raw_group in enumerate(require_list(mapping.get("groups") or [], "bias_metrics/groups")):
        group = require_mapping(raw_group, f"bias_metrics/groups/{i}")
        if "group_name" not in group:
            raise SchemaError(f"bias_metrics/groups/{i}/group_name", "missing")
        group_name = require_str(
            group["group_name"], f"bias_metrics/groups/{i}/group_name", allow_empty=False
        )
        if group_name in seen:
            raise SchemaError(
                f"bias_metrics/groups/{i}/group_name", f"duplicate group {group_name!r}"
            )
        seen.add(group_name)
        metrics = []
        for j, raw_metric in enumerate(
            require_list(group.get("metrics") or [], f"bias_metrics/groups/{i}/metrics")
        ):
            metric, metric_diags = parse_bias_metric(
                raw_metric, f"bias_metrics/groups/{i}/metrics/{j}"
            )
            metrics.append(metric)
            diags.extend(metric_diags)
        groups.append(MetricGroup(group_name=group_name, metrics=tuple(metrics)))
    return tuple(groups)


_KNOWN_KEYS = ("schema_version", "general", "data", "model", "bias_metrics", "risks")


def parse_fairness_log(text: str) -> tuple[FairnessLog, list[Diagnostic]]:
    """Parse a log document.

    Hard failures are malformed syntax, missing ``general/experiment_id`` or
    ``model/name``, and type or value violations; missing optional sections
    are defaulted and reported as diagnostics.
    """
    doc = load_yaml(text)
    mapping = require_mapping(doc, "")
    diags: list[Diagnostic] = []

    if "schema_version" not in mapping:
        diags.append(
            Diagnostic("MissingField", "schema_version absent; assuming 1", path="schema_version")
        )
    elif mapping["schema_version"] != SCHEMA_VERSION:
        diags.append(
            Diagnostic(
                "UnknownSchemaVersion",
                f"schema_version {mapping['schema_version']!r}; this reader targets {SCHEMA_VERSION}",
                path="schema_version",
            )
        )

    if "general" not in mapping or mapping["general"] is None:
        raise SchemaError("general/experiment_id", "missing required key")
    if "model" not in mapping or mapping["model"] is None:
        raise SchemaError("model/name", "missing required key")

    general = _parse_general(mapping["general"], diags)
    data = _parse_data(mapping.get("data"), diags)
    model = _parse_model(mapping["model"], diags)
    groups = _parse_groups(mapping.get("bias_metrics"), diags)

    risks = tuple(
        parse_raid(raw, f"risks/{i}")
        for i, raw in enumerate(require_list(mapping.get("risks") or [], "risks"))
    )

    extras = {k: mapping[k] for k in mapping if k not in _KNOWN_KEYS}
    for key in sorted(extras):
        diags.append(
            Diagnostic("UnknownField", f"unknown top-level key {key!r} preserved", path=key)
        )

    log = FairnessLog(
        general=general, data=data, model=model, groups=groups, risks=risks, extras=extras
    )
    return log, diags


# --- serialization -----------------------------------------------------------


def metric_to_plain(metric: BiasMetric) -> dict:
    out: dict = {"name": metric.name, "value": metric.value}
    if metric.description:
        out["description"] = metric.description
    if metric.thresholds is not None:
        out["thresholds"] = (
            list(metric.thresholds) if isinstance(metric.thresholds, tuple) else metric.thresholds
        )
        out["bigger_is_better"] = metric.bigger_is_better
    elif metric.bigger_is_better:
        out["bigger_is_better"] = True
    if metric.notes is not None:
        out["notes"] = metric.notes
    if metric.sg is not None:
        out["sg"] = metric.sg
    return out


def log_to_plain(log: FairnessLog) -> dict:
    general: dict = {
        "experiment_id": log.general.experiment_id,
        "title": log.general.title,
        "timestamp": format_instant(log.general.timestamp),
        "authors": list(log.general.authors),
        "description": log.general.description,
    }
    sample: dict = {
        "name": log.data.sample.name,
        "size": log.data.sample.size,
        "source": log.data.sample.source,
    }
    if log.data.sample.notes is not None:
        sample["notes"] = log.data.sample.notes
    variables = []
    for var in log.data.variables:
        entry: dict = {"name": var.name, "kind": var.kind.value}
        if var.summary is not None:
            entry["summary"] = var.summary
        variables.append(entry)
    model: dict = {"name": log.model.name}
    if log.model.version is not None:
        model["version"] = log.model.version
    model["sample_data"] = {
        "tps": log.model.sample_data.tps,
        "fps": log.model.sample_data.fps,
        "tns": log.model.sample_data.tns,
        "fns": log.model.sample_data.fns,
    }
    doc: dict = {
        "schema_version": SCHEMA_VERSION,
        "general": general,
        "data": {
            "sample": sample,
            "variables": variables,
            "sensitive_characteristics": list(log.data.sensitive_characteristics),
        },
        "model": model,
        "bias_metrics": {
            "groups": [
                {
                    "group_name": group.group_name,
                    "metrics": [metric_to_plain(m) for m in group.metrics],
                }
                for group in log.groups
            ]
        },
    }
    if log.risks:
        doc["risks"] = [raid_to_plain(r) for r in log.risks]
    for key in sorted(log.extras):
        doc[key] = log.extras[key]
    return doc


def serialize_fairness_log(log: FairnessLog) -> str:
    doc = log_to_plain(log)
    return dump_yaml({key: sorted_deep(value) for key, value in doc.items()})


def with_timestamp(log: FairnessLog, timestamp: datetime) -> FairnessLog:
    return replace(log, general=replace(log.general, timestamp=timestamp))
