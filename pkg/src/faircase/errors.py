"""Shared exception types and the diagnostic record used across the toolkit.

Hard failures raise an exception; recoverable schema gaps are reported as
:class:`Diagnostic` values so callers can decide how strict to be.
"""

from __future__ import annotations

from dataclasses import dataclass, field


class FaircaseError(Exception):
    """Base class for all errors raised by this package."""


class DocumentSyntaxError(FaircaseError):
    """Input text is not well-formed (position carried in the message)."""


class SchemaError(FaircaseError):
    """Well-formed document violates the expected schema.

    ``path`` is the slash-delimited location of the offending field.
    """

    def __init__(self, path: str, message: str = ""):
        self.path = path
        super().__init__(f"{path}: {message}" if message else path)


class NonGoalRootError(FaircaseError):
    """Case root element is not a goal claim."""


class DuplicateIdError(FaircaseError):
    """Element id already present in the case."""


class UnknownIdError(FaircaseError):
    """Referenced element id does not exist."""


class IllegalLinkKindError(FaircaseError):
    """Link between these element kinds is not allowed."""


class CycleDetectedError(FaircaseError):
    """Adding the link would create a cycle in the argument graph."""


class InvalidCaseError(FaircaseError):
    """Operation requires a structurally valid case."""

    def __init__(self, diagnostics):
        self.diagnostics = list(diagnostics)
        summary = "; ".join(str(d) for d in self.diagnostics) or "invalid case"
        super().__init__(summary)


class IncompleteStatesError(FaircaseError):
    """Evidence state map does not cover exactly the evidence nodes."""


class TooFewGroupsError(FaircaseError):
    """Fairness notion needs at least two groups."""


class UndefinedRateError(FaircaseError):
    """A required rate has a zero denominator for some group."""

    def __init__(self, group_name: str, rate: str):
        self.group_name = group_name
        self.rate = rate
        super().__init__(f"{rate} undefined for group {group_name!r} (zero denominator)")


class MissingThresholdError(FaircaseError):
    """Metric has no thresholds to gate against."""


class StaleWriteError(FaircaseError):
    """Incoming value is older than the one already recorded."""


class SchemaMismatchError(FaircaseError):
    """Documents being compared are of different schema kinds."""


class DuplicateBindingError(FaircaseError):
    """Two bindings target the same evidence node."""


class UnorderedSnapshotsError(FaircaseError):
    """Timeline snapshots are not strictly increasing in time."""


@dataclass(frozen=True)
class Diagnostic:
    """A named rule violation that did not abort processing.

    ``rule`` is a stable CamelCase token (e.g. ``CycleDetected``,
    ``MissingSection``); ``element_ids`` names case elements when the rule
    concerns a case graph, ``path`` names a document field otherwise.
    """

    rule: str
    message: str
    element_ids: tuple[str, ...] = ()
    path: str = ""

    def __str__(self) -> str:
        loc = ""
        if self.element_ids:
            loc = f" [{', '.join(self.element_ids)}]"
        elif self.path:
            loc = f" [{self.path}]"
        return f"{self.rule}:{loc} {self.message}"


def diagnostics_to_lines(diagnostics) -> list[str]:
    return [str(d) for d in diagnostics]
