"""Command-line interface.

Exit codes form the CI contract: 0 all gates pass, 1 gates failing
(evaluation ran but some evidence is failing, missing, or stale), 2 invalid
input, 3 external submission failure. Human summaries go to stdout; machine
artifacts only to files.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
import urllib.error
import urllib.request
from dataclasses import replace
from datetime import datetime, timezone
from pathlib import Path

from . import binder, case as case_mod, fairlog, figures, metrics, raid, report, syncing
from .cards import parse_model_card, serialize_card
from .errors import FaircaseError, TooFewGroupsError, UndefinedRateError
from .templates import TEMPLATES
from .yamlio import parse_instant

EXIT_OK = 0
EXIT_GATE_FAILURE = 1
EXIT_INVALID_INPUT = 2
EXIT_SUBMIT_FAILURE = 3


class TrackerError(FaircaseError):
    """Issue-tracker submission failed (network or HTTP error)."""


def _fail(message: str) -> int:
    print(f"error: {message}", file=sys.stderr)
    return EXIT_INVALID_INPUT


def _read_text(path: str) -> str:
    return Path(path).read_text(encoding="utf-8")


def _resolve_now(args: argparse.Namespace) -> datetime:
    if getattr(args, "now", None):
        return parse_instant(args.now, "--now")
    return datetime.now(timezone.utc)


def _verbose(args: argparse.Namespace, message: str) -> None:
    if getattr(args, "verbose", False):
        print(message, file=sys.stderr)


# --- validate ----------------------------------------------------------------


def _cmd_validate(args: argparse.Namespace) -> int:
    try:
        text = _read_text(args.case_file)
        parsed_case, diagnostics = case_mod.parse_case(text)
    except (OSError, FaircaseError) as exc:
        return _fail(str(exc))
    if diagnostics:
        for diagnostic in diagnostics:
            print(str(diagnostic), file=sys.stderr)
        return EXIT_INVALID_INPUT
    _verbose(args, f"case {parsed_case.case_id}: {len(parsed_case.elements)} elements")
    return EXIT_OK


# --- metrics -----------------------------------------------------------------

_NOTIONS = (
    ("demographic_parity_difference", metrics.demographic_parity_difference, False),
    ("demographic_parity_ratio", metrics.demographic_parity_ratio, True),
    ("equal_opportunity_difference", metrics.equal_opportunity_difference, False),
    ("equalized_odds_difference", metrics.equalized_odds_difference, False),
)

_RATE_FIELDS = ("selection_rate", "tpr", "fpr", "precision", "accuracy", "f1")


def _read_records(path: str) -> list[metrics.PredictionRecord]:
    with open(path, newline="", encoding="utf-8") as handle:
        reader = csv.DictReader(handle)
        if reader.fieldnames is None:
            raise FaircaseError(f"{path}: empty records file")
        fields = [name.strip() for name in reader.fieldnames]
        if set(fields) != {"group", "y_true", "y_pred"}:
            raise FaircaseError(
                f"{path}: header must be group,y_true,y_pred (got {', '.join(fields)})"
            )
        records = []
        for i, row in enumerate(reader, start=2):
            try:
                records.append(
                    metrics.PredictionRecord(
                        group=(row["group"] or "").strip(),
                        y_true=int(row["y_true"]),
                        y_pred=int(row["y_pred"]),
                    )
                )
            except (TypeError, ValueError) as exc:
                raise FaircaseError(f"{path}:{i}: bad record: {exc}")
    if not records:
        raise FaircaseError(f"{path}: no records")
    return records


def _fmt_rate(value: float | None) -> str:
    return f"{value:.4f}" if value is not None else "undef"


def _metrics_log(
    args: argparse.Namespace,
    counts: dict[str, metrics.ConfusionCounts],
    notion_values: list[tuple[str, float, bool]],
    record_count: int,
    now: datetime,
) -> fairlog.FairnessLog:
    out_path = Path(args.log_file)
    if out_path.exists():
        log, _ = fairlog.parse_fairness_log(out_path.read_text(encoding="utf-8"))
        log = fairlog.with_timestamp(log, now)
    else:
        experiment_id = args.experiment_id or out_path.stem
        log = fairlog.FairnessLog(
            general=fairlog.GeneralInfo(
                experiment_id=experiment_id,
                title="Group fairness metrics",
                timestamp=now,
                description=f"Computed from prediction records in {Path(args.records_file).name}.",
            ),
            data=fairlog.DataProfile(
                sample=fairlog.SampleInfo(
                    name=Path(args.records_file).stem,
                    size=record_count,
                    source=str(args.records_file),
                ),
                variables=(
                    fairlog.Variable(name=args.group_name, kind=fairlog.VariableKind.NOMINAL),
                ),
                sensitive_characteristics=(args.group_name,),
            ),
            model=fairlog.ModelInfo(name=args.model_name),
        )

    overall = metrics.ConfusionCounts(
        tps=sum(c.tps for c in counts.values()),
        fps=sum(c.fps for c in counts.values()),
        tns=sum(c.tns for c in counts.values()),
        fns=sum(c.fns for c in counts.values()),
    )

    groups: dict[str, list[metrics.BiasMetric]] = {}
    for group_name in sorted(counts):
        rates = metrics.group_rates(counts[group_name])
        c = counts[group_name]
        note = f"tps={c.tps} fps={c.fps} tns={c.tns} fns={c.fns}"
        entries = []
        for field in _RATE_FIELDS:
            value = getattr(rates, field)
            if value is None:
                continue
            entries.append(metrics.BiasMetric(name=field, value=value, notes=note))
        groups[group_name] = entries
    notion_entries = [
        metrics.BiasMetric(
            name=name,
            value=value,
            description="Computed across all sensitive groups.",
            bigger_is_better=bigger,
        )
        for name, value, bigger in notion_values
    ]
    if notion_entries:
        groups.setdefault("overall", []).extend(notion_entries)

    return replace(
        log,
        model=replace(log.model, sample_data=overall),
        groups=tuple(
            fairlog.MetricGroup(group_name=g, metrics=tuple(ms)) for g, ms in sorted(groups.items())
        ),
    )


def _cmd_metrics(args: argparse.Namespace) -> int:
    try:
        now = _resolve_now(args)
        records = _read_records(args.records_file)
    except (OSError, FaircaseError) as exc:
        return _fail(str(exc))

    counts = metrics.confusion_from_records(records)
    outcomes = [metrics.GroupOutcome(g, c) for g, c in counts.items()]

    header = f"{'group':<16} {'tps':>5} {'fps':>5} {'tns':>5} {'fns':>5}  " + "  ".join(
        f"{f:>9}" for f in _RATE_FIELDS
    )
    print(header)
    for group_name in sorted(counts):
        c = counts[group_name]
        rates = metrics.group_rates(c)
        cells = "  ".join(f"{_fmt_rate(getattr(rates, f)):>9}" for f in _RATE_FIELDS)
        print(f"{group_name:<16} {c.tps:>5} {c.fps:>5} {c.tns:>5} {c.fns:>5}  {cells}")

    notion_values: list[tuple[str, float, bool]] = []
    for name, fn, bigger in _NOTIONS:
        try:
            value = fn(outcomes)
        except TooFewGroupsError as exc:
            print(f"note: {name} skipped: {exc}", file=sys.stderr)
            continue
        except UndefinedRateError as exc:
            print(f"note: {name} skipped: {exc}", file=sys.stderr)
            continue
        if value is None:
            print(f"note: {name} undefined (all selection rates are 0)", file=sys.stderr)
            continue
        notion_values.append((name, value, bigger))
        print(f"{name}: {value:.6f}")

    try:
        log = _metrics_log(args, counts, notion_values, len(records), now)
        Path(args.log_file).write_text(fairlog.serialize_fairness_log(log), encoding="utf-8")
    except (OSError, FaircaseError) as exc:
        return _fail(str(exc))
    print(f"wrote fairness log: {args.log_file}")

    if args.figures_dir:
        figures_dir = Path(args.figures_dir)
        figures_dir.mkdir(parents=True, exist_ok=True)
        out = figures.save_group_rates_figure(
            counts, figures_dir / "group_rates.png", title=f"Per-group rates ({args.group_name})"
        )
        print(f"wrote figure: {out}")
    return EXIT_OK


# --- evaluate ----------------------------------------------------------------


def _cmd_evaluate(args: argparse.Namespace) -> int:
    try:
        parsed_case, diagnostics = case_mod.parse_case(_read_text(args.case_file))
        if diagnostics:
            for diagnostic in diagnostics:
                print(str(diagnostic), file=sys.stderr)
            return EXIT_INVALID_INPUT
        bindings = binder.parse_bindings(_read_text(args.bindings_file))
        artifact_dir = Path(args.artifact_dir)
        if not artifact_dir.is_dir():
            return _fail(f"artifact directory not found: {artifact_dir}")
        artifacts = binder.load_artifact_dir(artifact_dir)
        now = _resolve_now(args)
        evaluation = binder.evaluate_case(parsed_case, bindings, artifacts, now)
    except (OSError, FaircaseError) as exc:
        return _fail(str(exc))

    if args.report:
        text = report.generate_report(parsed_case, evaluation, args.format)
        Path(args.report).write_text(text, encoding="utf-8")
        print(f"wrote report: {args.report}")
    if args.figures_dir:
        figures_dir = Path(args.figures_dir)
        figures_dir.mkdir(parents=True, exist_ok=True)
        out = figures.save_status_figure(parsed_case, evaluation, figures_dir / "case_status.png")
        print(f"wrote figure: {out}")

    root_status = evaluation.rollup.statuses[parsed_case.root]
    print(f"goal {parsed_case.root}: {root_status.value.upper()}")
    for eid in sorted(evaluation.evidence_results):
        result = evaluation.evidence_results[eid]
        if result.state is not case_mod.EvidenceState.PASSING:
            print(f"  {eid} [{result.state.value}] {result.detail}")
    _verbose(args, "\n".join(f"{name}  {digest}" for name, digest in evaluation.artifacts_seen))

    if root_status is case_mod.ElementStatus.SUPPORTED:
        return EXIT_OK
    return EXIT_GATE_FAILURE


# --- sync --------------------------------------------------------------------


def _cmd_sync(args: argparse.Namespace) -> int:
    try:
        log, _ = fairlog.parse_fairness_log(_read_text(args.log_file))
        card, _ = parse_model_card(_read_text(args.card_file))
    except (OSError, FaircaseError) as exc:
        return _fail(str(exc))

    result = syncing.sync_log_to_card(log, card)
    for diagnostic in result.diagnostics:
        print(f"warning: {diagnostic}", file=sys.stderr)
    if result.diff.is_empty():
        print("no changes")
        return EXIT_OK
    for entry in result.diff.entries:
        if entry.change.value == "added":
            print(f"added {entry.path}: {entry.after!r}")
        elif entry.change.value == "removed":
            print(f"removed {entry.path}: {entry.before!r}")
        else:
            print(f"modified {entry.path}: {entry.before!r} -> {entry.after!r}")
    if args.dry_run:
        print("dry run: card not written")
        return EXIT_OK
    try:
        Path(args.card_file).write_text(serialize_card(result.card), encoding="utf-8")
    except OSError as exc:
        return _fail(str(exc))
    print(f"updated card: {args.card_file}")
    return EXIT_OK


# --- export-risks ------------------------------------------------------------


def _http_json(request: urllib.request.Request) -> object:
    with urllib.request.urlopen(request, timeout=30) as response:
        return json.loads(response.read().decode("utf-8"))


def _cmd_export_risks(args: argparse.Namespace) -> int:
    try:
        log, _ = fairlog.parse_fairness_log(_read_text(args.log_file))
        evaluation = None
        if args.evaluation_file:
            evaluation = report.parse_machine_report(_read_text(args.evaluation_file))
    except (OSError, FaircaseError) as exc:
        return _fail(str(exc))

    records = raid.extract_raids(log, evaluation)
    payloads = [raid.to_issue_payload(r) for r in records]

    if args.offline:
        out_dir = Path(args.out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        for payload in payloads:
            (out_dir / f"{payload.idempotency_key}.json").write_text(
                raid.payload_to_json(payload), encoding="utf-8"
            )
        print(f"wrote {len(payloads)} payload file(s) to {out_dir}")
        return EXIT_OK

    if not args.endpoint:
        return _fail("either --offline or --endpoint is required")
    token = os.environ.get(args.token_env) if args.token_env else None
    headers = {"Accept": "application/json", "Content-Type": "application/json"}
    if token:
        headers["Authorization"] = f"token {token}"

    try:
        listing = _http_json(
            urllib.request.Request(f"{args.endpoint}?state=all", headers=headers)
        )
        bodies = [issue.get("body", "") for issue in listing if isinstance(issue, dict)]
        existing = raid.keys_from_issue_bodies(bodies)
        plan = raid.plan_submission(payloads, existing)
        for payload in plan:
            data = raid.payload_to_json(payload).encode("utf-8")
            _http_json(
                urllib.request.Request(
                    args.endpoint, data=data, headers=headers, method="POST"
                )
            )
            print(f"submitted {payload.idempotency_key}")
    except (urllib.error.URLError, urllib.error.HTTPError, TimeoutError, json.JSONDecodeError) as exc:
        print(f"error: tracker submission failed: {exc}", file=sys.stderr)
        return EXIT_SUBMIT_FAILURE
    print(f"{len(plan)} submitted, {len(payloads) - len(plan)} already filed")
    return EXIT_OK


# --- init ----------------------------------------------------------------------


def _cmd_init(args: argparse.Namespace) -> int:
    target = Path(args.path)
    if target.exists():
        return _fail(f"refusing to overwrite existing path: {target}")
    try:
        target.write_text(TEMPLATES[args.kind], encoding="utf-8")
    except OSError as exc:
        return _fail(str(exc))
    print(f"wrote {args.kind} template: {target}")
    return EXIT_OK


# --- parser --------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--now", help="freeze the clock to an ISO-8601 instant")
    common.add_argument(
        "--format", choices=report.REPORT_FORMATS, default="markdown", help="report format"
    )
    common.add_argument("--verbose", action="store_true", help="extra detail on stderr")

    parser = argparse.ArgumentParser(
        prog="faircase",
        description="Fairness assurance cases with continuous evidence collection.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", parents=[common], help="structurally validate a case file")
    p.add_argument("case_file")
    p.set_defaults(func=_cmd_validate)

    p = sub.add_parser(
        "metrics", parents=[common], help="compute group fairness metrics from records"
    )
    p.add_argument("records_file", help="CSV with header group,y_true,y_pred")
    p.add_argument("log_file", help="fairness log to write or update")
    p.add_argument("--group-name", default="group", help="sensitive attribute name")
    p.add_argument("--experiment-id", default=None)
    p.add_argument("--model-name", default="unspecified-model")
    p.add_argument("--figures-dir", default=None, help="also render figures here")
    p.set_defaults(func=_cmd_metrics)

    p = sub.add_parser(
        "evaluate", parents=[common], help="evaluate a case against artifact evidence"
    )
    p.add_argument("case_file")
    p.add_argument("bindings_file")
    p.add_argument("artifact_dir")
    p.add_argument("--report", default=None, help="write the report to this path")
    p.add_argument("--figures-dir", default=None, help="also render figures here")
    p.set_defaults(func=_cmd_evaluate)

    p = sub.add_parser("sync", parents=[common], help="sync log metrics into a model card")
    p.add_argument("log_file")
    p.add_argument("card_file")
    p.add_argument("--dry-run", action="store_true", help="print the diff without writing")
    p.set_defaults(func=_cmd_sync)

    p = sub.add_parser(
        "export-risks", parents=[common], help="export RAID records as issue payloads"
    )
    p.add_argument("log_file")
    p.add_argument("evaluation_file", nargs="?", default=None, help="machine report (optional)")
    p.add_argument("--offline", action="store_true", help="write payload files, do not submit")
    p.add_argument("--out-dir", default="risk-payloads", help="payload directory for --offline")
    p.add_argument("--endpoint", default=None, help="issue tracker endpoint URL")
    p.add_argument("--token-env", default=None, help="environment variable holding the token")
    p.set_defaults(func=_cmd_export_risks)

    p = sub.add_parser("init", parents=[common], help="write a commented template file")
    p.add_argument("kind", choices=sorted(TEMPLATES))
    p.add_argument("path")
    p.set_defaults(func=_cmd_init)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return int(args.func(args))
    except FaircaseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID_INPUT


if __name__ == "__main__":
    raise SystemExit(main())
