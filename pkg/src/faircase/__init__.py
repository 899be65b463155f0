"""Argument-based fairness assurance cases with continuous evidence collection.

The package splits into: the assurance-case graph model (:mod:`faircase.case`),
group fairness metrics (:mod:`faircase.metrics`), the fairness log and
transparency-card parsers (:mod:`faircase.fairlog`, :mod:`faircase.cards`),
document diffing and log-to-card sync (:mod:`faircase.diffing`,
:mod:`faircase.syncing`), evidence binding and evaluation
(:mod:`faircase.binder`, :mod:`faircase.report`, :mod:`faircase.figures`),
and RAID risk export (:mod:`faircase.raid`). :mod:`faircase.cli` wires them
into the ``faircase`` command.
"""

from .binder import (
    CaseEvaluation,
    Check,
    CheckKind,
    EvidenceBinding,
    EvidenceResult,
    MISSING,
    ParsedArtifact,
    Timeline,
    TimelineEntry,
    build_timeline,
    check_evidence,
    evaluate_case,
    load_artifact,
    load_artifact_dir,
    parse_bindings,
    resolve_binding,
    serialize_bindings,
)
from .cards import (
    Canvas,
    CardField,
    CardKind,
    DataCard,
    ModelCard,
    QuantEntry,
    Relationship,
    UseCaseCard,
    UseCaseTable,
    parse_card,
    serialize_card,
)
from .case import (
    AssuranceCase,
    CaseStatus,
    Element,
    ElementKind,
    ElementStatus,
    EvidenceMeta,
    EvidenceState,
    QualityLevel,
    TaxonomyTag,
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
from .diffing import ChangeKind, DiffEntry, DocumentDiff, apply_diff, diff_documents, diff_trees
from .errors import Diagnostic, FaircaseError
from .fairlog import (
    DataProfile,
    FairnessLog,
    GeneralInfo,
    MetricGroup,
    ModelInfo,
    SampleInfo,
    Variable,
    VariableKind,
    parse_fairness_log,
    serialize_fairness_log,
)
from .metrics import (
    BiasMetric,
    ConfusionCounts,
    GateResult,
    GroupOutcome,
    PredictionRecord,
    RateBundle,
    confusion_from_records,
    demographic_parity_difference,
    demographic_parity_ratio,
    equal_opportunity_difference,
    equalized_odds_difference,
    evaluate_threshold,
    group_rates,
)
from .raid import (
    IssuePayload,
    Origin,
    RaidKind,
    RaidRecord,
    Severity,
    extract_raids,
    plan_submission,
    to_issue_payload,
)
from .report import generate_report, parse_machine_report
from .syncing import SyncResult, sync_log_to_card

__version__ = "0.1.0"
