"""Push bias metrics from a fairness log into a model card.

Each metric lands in the card's quantitative analyses under the name
``<metric>/<group>[/<subgroup>]`` with provenance ``<experiment>@<timestamp>``.
Existing entries are replaced by name with newest-timestamp-wins; older logs
leave the card untouched and surface a stale-write diagnostic.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from datetime import datetime

from .cards import ModelCard, QuantEntry, model_card_to_plain
from .diffing import DocumentDiff, diff_trees
from .errors import Diagnostic
from .fairlog import FairnessLog
from .yamlio import format_instant, parse_instant


@dataclass(frozen=True)
class SyncResult:
    card: ModelCard
    diff: DocumentDiff
    diagnostics: tuple[Diagnostic, ...] = ()


def metric_entry_name(metric_name: str, group_name: str, sg: str | None) -> str:
    name = f"{metric_name}/{group_name}"
    return f"{name}/{sg}" if sg else name


def provenance_stamp(experiment_id: str, timestamp: datetime) -> str:
    return f"{experiment_id}@{format_instant(timestamp)}"


def _provenance_timestamp(provenance: str | None) -> datetime | None:
    if not provenance or "@" not in provenance:
        return None
    _, _, stamp = provenance.rpartition("@")
    try:
        return parse_instant(stamp, "provenance")
    except Exception:
        return None


def sync_log_to_card(log: FairnessLog, card: ModelCard) -> SyncResult:
    """Merge the log's bias metrics into the card's quantitative analyses.

    Idempotent: syncing the same log again yields an empty diff. Content
    outside quantitative analyses is untouched.
    """
    entries = list(card.quantitative_analyses)
    index_by_name = {entry.metric_name: i for i, entry in enumerate(entries)}
    diagnostics: list[Diagnostic] = []
    provenance = provenance_stamp(log.general.experiment_id, log.general.timestamp)

    for group in log.groups:
        for metric in group.metrics:
            name = metric_entry_name(metric.name, group.group_name, metric.sg)
            incoming = QuantEntry(
                metric_name=name,
                value=metric.value,
                group=group.group_name,
                provenance=provenance,
            )
            if name in index_by_name:
                i = index_by_name[name]
                existing_ts = _provenance_timestamp(entries[i].provenance)
                if existing_ts is not None and log.general.timestamp < existing_ts:
                    diagnostics.append(
                        Diagnostic(
                            "StaleWrite",
                            f"log {log.general.experiment_id!r} "
                            f"({format_instant(log.general.timestamp)}) is older than the "
                            f"recorded entry ({entries[i].provenance}); keeping the card value",
                            path=f"sections/quantitative_analyses/{i}",
                        )
                    )
                    continue
                entries[i] = incoming
            else:
                index_by_name[name] = len(entries)
                entries.append(incoming)

    updated = replace(card, quantitative_analyses=tuple(entries))
    diff = diff_trees(model_card_to_plain(card), model_card_to_plain(updated))
    return SyncResult(card=updated, diff=diff, diagnostics=tuple(diagnostics))
