"""Deterministic YAML reading and writing shared by every document parser.

All documents in this toolkit are UTF-8 YAML. Output is byte-deterministic:
no anchors, 2-space indentation, stable key order decided by the caller.
"""

from __future__ import annotations

import re
from datetime import datetime, timedelta, timezone
from typing import Any

import yaml

from .errors import DocumentSyntaxError, SchemaError

_DURATION_RE = re.compile(r"^\s*(\d+(?:\.\d+)?)\s*(d|h|m|s)?\s*$")
_DURATION_UNITS = {"d": 86400.0, "h": 3600.0, "m": 60.0, "s": 1.0}


class _Dumper(yaml.SafeDumper):
    """SafeDumper that never emits anchors/aliases."""

    def ignore_aliases(self, data: Any) -> bool:
        return True


def dump_yaml(data: Any) -> str:
    """Serialize ``data`` deterministically (insertion order preserved)."""
    return yaml.dump(
        data,
        Dumper=_Dumper,
        sort_keys=False,
        allow_unicode=True,
        indent=2,
        default_flow_style=False,
        width=4096,
    )


def load_yaml(text: str) -> Any:
    """Parse YAML text, raising :class:`DocumentSyntaxError` with position."""
    try:
        return yaml.safe_load(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        if mark is not None:
            raise DocumentSyntaxError(
                f"line {mark.line + 1}, column {mark.column + 1}: {getattr(exc, 'problem', exc)}"
            ) from exc
        raise DocumentSyntaxError(str(exc)) from exc


def sorted_deep(value: Any) -> Any:
    """Return a copy with every mapping's keys sorted lexicographically."""
    if isinstance(value, dict):
        return {k: sorted_deep(value[k]) for k in sorted(value, key=str)}
    if isinstance(value, (list, tuple)):
        return [sorted_deep(v) for v in value]
    return value


def parse_instant(value: Any, path: str) -> datetime:
    """Normalize a YAML timestamp or ISO-8601 string to an aware UTC datetime."""
    if isinstance(value, datetime):
        dt = value
    elif isinstance(value, str):
        text = value.strip()
        if text.endswith(("Z", "z")):
            text = text[:-1] + "+00:00"
        try:
            dt = datetime.fromisoformat(text)
        except ValueError as exc:
            raise SchemaError(path, f"not an ISO-8601 instant: {value!r}") from exc
    else:
        raise SchemaError(path, f"expected timestamp, got {type(value).__name__}")
    if dt.tzinfo is None:
        dt = dt.replace(tzinfo=timezone.utc)
    return dt.astimezone(timezone.utc)


def format_instant(dt: datetime) -> str:
    if dt.tzinfo is None:
        dt = dt.replace(tzinfo=timezone.utc)
    return dt.astimezone(timezone.utc).isoformat()


def parse_duration(value: Any, path: str = "max_age") -> timedelta:
    """Parse a duration: number of seconds, or ``"30d"``/``"12h"``/``"45m"``/``"90s"``."""
    if isinstance(value, timedelta):
        return value
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return timedelta(seconds=float(value))
    if isinstance(value, str):
        m = _DURATION_RE.match(value)
        if m:
            amount = float(m.group(1))
            unit = m.group(2) or "s"
            return timedelta(seconds=amount * _DURATION_UNITS[unit])
    raise SchemaError(path, f"not a duration: {value!r}")


def resolve_path(tree: Any, path: str) -> tuple[bool, Any]:
    """Look up a slash-delimited field path in a plain YAML tree.

    Returns ``(found, value)``; list segments are decimal indices.
    """
    node = tree
    if path in ("", "/"):
        return True, node
    for segment in path.strip("/").split("/"):
        if isinstance(node, dict):
            if segment not in node:
                return False, None
            node = node[segment]
        elif isinstance(node, list):
            if not segment.lstrip("-").isdigit():
                return False, None
            idx = int(segment)
            if not 0 <= idx < len(node):
                return False, None
            node = node[idx]
        else:
            return False, None
    return True, node


def require_mapping(value: Any, path: str) -> dict:
    if not isinstance(value, dict):
        raise SchemaError(path, f"expected mapping, got {type(value).__name__}")
    return value


def require_list(value: Any, path: str) -> list:
    if not isinstance(value, list):
        raise SchemaError(path, f"expected list, got {type(value).__name__}")
    return value


def require_str(value: Any, path: str, allow_empty: bool = True) -> str:
    if not isinstance(value, str):
        raise SchemaError(path, f"expected string, got {type(value).__name__}")
    if not allow_empty and not value.strip():
        raise SchemaError(path, "must be non-empty")
    return value


def require_int(value: Any, path: str, minimum: int | None = None) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise SchemaError(path, f"expected integer, got {type(value).__name__}")
    if minimum is not None and value < minimum:
        raise SchemaError(path, f"must be >= {minimum}, got {value}")
    return value


def require_number(value: Any, path: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise SchemaError(path, f"expected number, got {type(value).__name__}")
    return float(value)
