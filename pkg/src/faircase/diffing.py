"""Structural field-path diffs between documents of the same schema kind.

Paths are slash-delimited; list positions are decimal indices. A diff is
exact: applying it to the before-document reproduces the after-document.
"""

from __future__ import annotations

import copy
from dataclasses import dataclass
from enum import Enum
from typing import Any

from .cards import DATA_CARD_VOCABULARY, MODEL_CARD_SECTIONS
from .errors import SchemaMismatchError
from .yamlio import load_yaml


class ChangeKind(Enum):
    ADDED = "added"
    REMOVED = "removed"
    MODIFIED = "modified"


@dataclass(frozen=True)
class DiffEntry:
    path: str
    change: ChangeKind
    before: Any = None
    after: Any = None


@dataclass(frozen=True)
class DocumentDiff:
    entries: tuple[DiffEntry, ...] = ()

    def is_empty(self) -> bool:
        return not self.entries

    def __len__(self) -> int:
        return len(self.entries)


def _join(prefix: str, segment: str) -> str:
    return f"{prefix}/{segment}" if prefix else segment


def diff_trees(before: Any, after: Any, prefix: str = "") -> DocumentDiff:
    """Minimal field-path diff between two plain YAML trees."""
    entries: list[DiffEntry] = []
    _diff_into(before, after, prefix, entries)
    return DocumentDiff(entries=tuple(entries))


def _diff_into(before: Any, after: Any, prefix: str, entries: list[DiffEntry]) -> None:
    if isinstance(before, dict) and isinstance(after, dict):
        for key in sorted(set(before) | set(after), key=str):
            path = _join(prefix, str(key))
            if key not in after:
                entries.append(DiffEntry(path, ChangeKind.REMOVED, before=before[key]))
            elif key not in before:
                entries.append(DiffEntry(path, ChangeKind.ADDED, after=after[key]))
            else:
                _diff_into(before[key], after[key], path, entries)
        return
    if isinstance(before, list) and isinstance(after, list):
        common = min(len(before), len(after))
        for i in range(common):
            _diff_into(before[i], after[i], _join(prefix, str(i)), entries)
        for i in range(common, len(before)):
            entries.append(DiffEntry(_join(prefix, str(i)), ChangeKind.REMOVED, before=before[i]))
        for i in range(common, len(after)):
            entries.append(DiffEntry(_join(prefix, str(i)), ChangeKind.ADDED, after=after[i]))
        return
    if before != after or type(before) is not type(after):
        entries.append(DiffEntry(prefix, ChangeKind.MODIFIED, before=before, after=after))


def _segments(path: str) -> list[str]:
    return [] if path == "" else path.split("/")


def _sort_key(path: str) -> tuple:
    # Numeric-aware ordering so list indices sort as numbers, not strings.
    key: list[tuple[int, Any]] = []
    for segment in _segments(path):
        if segment.isdigit():
            key.append((0, int(segment)))
        else:
            key.append((1, segment))
    return tuple(key)


def _walk_to_parent(tree: Any, path: str) -> tuple[Any, str]:
    segments = _segments(path)
    node = tree
    for segment in segments[:-1]:
        node = node[int(segment)] if isinstance(node, list) else node[segment]
    return node, segments[-1]


def apply_diff(before: Any, diff: DocumentDiff) -> Any:
    """Replay a diff onto a tree; inverse of :func:`diff_trees`."""
    result = copy.deepcopy(before)
    modifications = [e for e in diff.entries if e.change is ChangeKind.MODIFIED]
    removals = [e for e in diff.entries if e.change is ChangeKind.REMOVED]
    additions = [e for e in diff.entries if e.change is ChangeKind.ADDED]

    for entry in modifications:
        if entry.path == "":
            result = copy.deepcopy(entry.after)
            continue
        parent, last = _walk_to_parent(result, entry.path)
        if isinstance(parent, list):
            parent[int(last)] = copy.deepcopy(entry.after)
        else:
            parent[last] = copy.deepcopy(entry.after)

    # Delete deepest/highest indices first so earlier removals don't shift paths.
    for entry in sorted(removals, key=lambda e: _sort_key(e.path), reverse=True):
        parent, last = _walk_to_parent(result, entry.path)
        if isinstance(parent, list):
            del parent[int(last)]
        else:
            del parent[last]

    for entry in sorted(additions, key=lambda e: _sort_key(e.path)):
        parent, last = _walk_to_parent(result, entry.path)
        if isinstance(parent, list):
            parent.insert(int(last), copy.deepcopy(entry.after))
        else:
            parent[last] = copy.deepcopy(entry.after)

    return result


def detect_kind(tree: Any) -> str:
    """Best-effort schema kind of a parsed document; ``unknown`` when unclear."""
    if not isinstance(tree, dict):
        return "unknown"
    if "schema_version" in tree and "general" in tree:
        return "fairness_log"
    if "case_id" in tree and "elements" in tree:
        return "case"
    if "canvas" in tree and "table" in tree:
        return "use_case_card"
    if isinstance(tree.get("sections"), dict):
        sections = tree["sections"]
        if any(key in sections for key in MODEL_CARD_SECTIONS):
            return "model_card"
        if any(key in sections for key in DATA_CARD_VOCABULARY):
            return "data_card"
    return "unknown"


def diff_documents(before_text: str, after_text: str) -> DocumentDiff:
    """Diff two serialized documents of the same schema kind."""
    before = load_yaml(before_text)
    after = load_yaml(after_text)
    kind_before = detect_kind(before)
    kind_after = detect_kind(after)
    if "unknown" not in (kind_before, kind_after) and kind_before != kind_after:
        raise SchemaMismatchError(
            f"cannot diff a {kind_before} document against a {kind_after} document"
        )
    return diff_trees(before, after)
