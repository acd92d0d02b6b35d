"""Command-line entry point: stats, split, audit, compare, serve.

Exit codes make the auditor usable as a CI gate: 0 success, 1 any error
(usage or data, with file/line context on stderr), 2 when --fail-on-alert is
set and a summary card reaches alert. Identical invocations on identical
inputs produce byte-identical artifacts; no command mutates its inputs.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from datetime import datetime, timezone

from .errors import AuditError, EmptyReference, EmptyTargets
from .diagnostics import cold_start, compare_splits, distribution_shift, leakage
from .ingest import ColumnMapping, parse_log
from .log import InteractionLog, ValidationReport, validate_log
from .preprocess import PreprocessSpec, apply_preprocessing
from .report import ThresholdConfig, render_markdown, summarize
from .serialize import from_json, to_json
from .split import (
    BUNDLE_ROLES,
    SplitBundle,
    SplitSpec,
    describe_split,
    load_bundle,
    make_split,
    save_bundle,
)
from .stats import (
    GRANULARITIES,
    compare_stats,
    core_stats,
    repeat_stats,
    temporal_stats,
    timeline,
)

THRESHOLDS_ENV = "SPLITAUDIT_THRESHOLDS"


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on usage errors; 2 is reserved for the alert gate here
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


def _add_mapping_flags(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("column mapping")
    g.add_argument("--user-col", default="user_id")
    g.add_argument("--item-col", default="item_id")
    g.add_argument("--time-col", default="timestamp")
    g.add_argument(
        "--time-format",
        default="epoch_seconds",
        choices=["epoch_seconds", "epoch_millis", "iso8601"],
    )
    g.add_argument("--skip-malformed", action="store_true",
                   help="skip unparseable rows instead of failing; reports the count")


def _add_preprocess_flags(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("preprocessing")
    g.add_argument("--n-core", type=int, default=None)
    g.add_argument("--drop-consecutive", action="store_true")
    g.add_argument("--shuffle-collisions-seed", type=int, default=None)


def _add_split_flags(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("split")
    g.add_argument("--split", choices=["loo", "gts"], default="gts")
    g.add_argument("--q-val", type=float, default=0.8)
    g.add_argument("--q-test", type=float, default=0.9)
    g.add_argument("--target", choices=["last", "all"], default="last")
    g.add_argument("--keep-cold", action="store_true",
                   help="keep cold items in evaluation targets")
    g.add_argument("--filter-cold-inputs", action="store_true",
                   help="also drop cold items from evaluation inputs")
    g.add_argument("--min-user-length", type=int, default=3)


def _add_output_flags(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("output")
    g.add_argument("--out-dir", default=".")
    g.add_argument("--format", choices=["json", "markdown", "both"], default="both")
    g.add_argument("--thresholds", default=None,
                   help=f"threshold config JSON (default ${THRESHOLDS_ENV})")
    g.add_argument("--granularity", choices=list(GRANULARITIES), default="day")
    g.add_argument("--date-range", nargs=2, metavar=("START", "END"), default=None,
                   help="epoch ms or ISO dates bounding timeline buckets")
    g.add_argument("--fail-on-alert", action="store_true",
                   help="exit 2 when any summary card reaches alert")
    g.add_argument("--generated-at", type=int, default=None,
                   help="epoch ms stamped into the summary (default $SOURCE_DATE_EPOCH, else omitted)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="splitaudit", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_stats = sub.add_parser("stats", help="dataset-level reports for one subset")
    p_stats.add_argument("--input", required=True)
    p_stats.add_argument("--reference", default=None,
                         help="second file to compare against (same mapping)")
    _add_mapping_flags(p_stats)
    _add_preprocess_flags(p_stats)
    _add_output_flags(p_stats)

    p_split = sub.add_parser("split", help="materialize a split bundle to CSVs")
    p_split.add_argument("--input", required=True)
    p_split.add_argument("--prefix", default="split")
    _add_mapping_flags(p_split)
    _add_preprocess_flags(p_split)
    _add_split_flags(p_split)
    _add_output_flags(p_split)

    p_audit = sub.add_parser("audit", help="full audit of a raw file + split spec, or an existing bundle directory")
    src = p_audit.add_mutually_exclusive_group(required=True)
    src.add_argument("--input", default=None)
    src.add_argument("--bundle-dir", default=None)
    p_audit.add_argument("--prefix", default="split", help="bundle filename prefix")
    p_audit.add_argument("--dataset-name", default=None)
    _add_mapping_flags(p_audit)
    _add_preprocess_flags(p_audit)
    _add_split_flags(p_audit)
    _add_output_flags(p_audit)

    p_cmp = sub.add_parser("compare", help="compare two or more split bundles")
    p_cmp.add_argument("--bundle", action="append", default=[],
                       help="bundle directory (repeatable)")
    p_cmp.add_argument("--input", default=None, help="raw file to split with --split-spec")
    p_cmp.add_argument("--split-spec", action="append", default=[],
                       help="split spec JSON file (repeatable, with --input)")
    p_cmp.add_argument("--prefix", default="split")
    p_cmp.add_argument("--eval", dest="eval_side", choices=["validation", "test"], default="test")
    p_cmp.add_argument("--allow-provenance-mismatch", action="store_true")
    _add_mapping_flags(p_cmp)
    _add_preprocess_flags(p_cmp)
    _add_output_flags(p_cmp)

    p_serve = sub.add_parser("serve", help="start the HTTP API")
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--port", type=int, default=8000)
    p_serve.add_argument("--cors-origin", action="append", default=None,
                         help="allowed dashboard origin (repeatable; default *)")
    p_serve.add_argument("--max-upload-bytes", type=int, default=50 * 1024 * 1024)
    p_serve.add_argument("--persist-dir", default=None,
                         help="directory where created bundles survive restarts")
    p_serve.add_argument("--thresholds", default=None)

    return parser


# ---------------------------------------------------------------------------
# shared pieces


def _mapping(args) -> ColumnMapping:
    return ColumnMapping(args.user_col, args.item_col, args.time_col, args.time_format)


def _preprocess_spec(args) -> PreprocessSpec:
    return PreprocessSpec(
        n_core=args.n_core,
        drop_consecutive_repeats=args.drop_consecutive,
        shuffle_collisions_seed=args.shuffle_collisions_seed,
    )


def _split_spec(args) -> SplitSpec:
    if args.split == "loo":
        return SplitSpec(
            strategy="leave_one_out",
            filter_cold_items=not args.keep_cold,
            filter_cold_inputs=args.filter_cold_inputs,
            min_user_length_loo=args.min_user_length,
        )
    return SplitSpec(
        strategy="global_temporal",
        q_val=args.q_val,
        q_test=args.q_test,
        target_mode="last_item" if args.target == "last" else "all_items",
        filter_cold_items=not args.keep_cold,
        filter_cold_inputs=args.filter_cold_inputs,
    )


def _thresholds(args) -> ThresholdConfig:
    path = args.thresholds or os.environ.get(THRESHOLDS_ENV)
    if not path:
        return ThresholdConfig()
    with open(path, "rb") as fh:
        cfg = from_json(fh.read())
    if not isinstance(cfg, ThresholdConfig):
        raise AuditError(f"{path}: not a ThresholdConfig document")
    return cfg


def _generated_at(args) -> int | None:
    if args.generated_at is not None:
        return args.generated_at
    sde = os.environ.get("SOURCE_DATE_EPOCH")
    return int(sde) * 1000 if sde else None


def _parse_date_range(args) -> tuple[int, int] | None:
    if not args.date_range:
        return None

    def one(v: str) -> int:
        try:
            return int(v)
        except ValueError:
            dt = datetime.fromisoformat(v)
            if dt.tzinfo is None:
                dt = dt.replace(tzinfo=timezone.utc)
            return int(dt.timestamp() * 1000)

    return one(args.date_range[0]), one(args.date_range[1])


def _parse_input(args, role: str = "raw") -> InteractionLog:
    skipped: list = []
    log = parse_log(args.input, _mapping(args), role,
                    skip_malformed=args.skip_malformed, skipped=skipped)
    if skipped:
        print(f"skipped {len(skipped)} malformed rows", file=sys.stderr)
    return log


def _write(out_dir: str, name: str, data: bytes) -> None:
    os.makedirs(out_dir, exist_ok=True)
    with open(os.path.join(out_dir, name), "wb") as fh:
        fh.write(data)


def _emit_json(args, name: str, report) -> None:
    if args.format in ("json", "both"):
        _write(args.out_dir, name, to_json(report))


# ---------------------------------------------------------------------------
# subcommands


def cmd_stats(args) -> int:
    pre = _preprocess_spec(args)  # flag validation precedes any I/O
    _thresholds(args)
    raw = _parse_input(args)
    analysed = apply_preprocessing(raw, pre)
    reference = None
    if not pre.is_noop():
        reference = raw
    elif args.reference:
        skipped: list = []
        reference = parse_log(args.reference, _mapping(args), "raw",
                              skip_malformed=args.skip_malformed, skipped=skipped)

    role = analysed.role
    reports = {
        f"core_{role}.json": core_stats(analysed),
        f"temporal_{role}.json": temporal_stats(analysed),
        f"repeats_{role}.json": repeat_stats(analysed),
    }
    tl_logs = {role: analysed}
    if reference is not None:
        tl_logs["reference"] = reference
    reports["timeline.json"] = timeline(tl_logs, args.granularity, _parse_date_range(args))
    details = list(reports.values())
    if reference is not None:
        for make, name in ((core_stats, "core"), (temporal_stats, "temporal"), (repeat_stats, "repeats")):
            cmp = compare_stats(make(analysed), make(reference))
            reports[f"compare_{name}.json"] = cmp
            details.append(cmp)
    for name, report in reports.items():
        _emit_json(args, name, report)

    summary = summarize(
        [reports[f"temporal_{role}.json"], reports[f"repeats_{role}.json"]],
        _thresholds(args),
        dataset=os.path.basename(args.input),
        provenance=f"{os.path.basename(args.input)}|{pre.describe()}",
        generated_at=_generated_at(args),
    )
    _emit_json(args, "summary.json", summary)
    if args.format in ("markdown", "both"):
        _write(args.out_dir, "stats.md", render_markdown(summary, details).encode("utf-8"))
    if args.fail_on_alert and summary.worst_status() == "alert":
        return 2
    return 0


def cmd_split(args) -> int:
    pre = _preprocess_spec(args)  # flag validation precedes any I/O
    spec = _split_spec(args)
    raw = _parse_input(args)
    prepared = apply_preprocessing(raw, pre)
    provenance = f"{os.path.basename(args.input)}|{pre.describe()}"
    bundle = make_split(prepared, spec, provenance)
    save_bundle(bundle, args.out_dir, args.prefix)
    desc = describe_split(bundle)
    _emit_json(args, "description.json", desc)
    if args.format in ("markdown", "both"):
        doc = render_markdown(
            summarize([temporal_stats(prepared), repeat_stats(prepared)],
                      _thresholds(args),
                      dataset=os.path.basename(args.input),
                      provenance=provenance,
                      generated_at=_generated_at(args)),
            [desc],
        )
        _write(args.out_dir, "description.md", doc.encode("utf-8"))
    return 0


def _audit_bundle(args, bundle: SplitBundle, source: InteractionLog | None,
                  dataset_name: str, validation: ValidationReport | None) -> int:
    out: dict[str, object] = {}
    if validation is not None:
        out["validation.json"] = validation
    desc = describe_split(bundle)
    out["description.json"] = desc

    if source is not None:
        base = source
        base_role = source.role
    else:
        # external bundle: approximate the source as train + targets
        base = InteractionLog.from_rows(
            [
                (it.user_id, it.item_id, it.timestamp, i)
                for i, it in enumerate(
                    list(bundle.train)
                    + list(bundle.val_target)
                    + list(bundle.test_target)
                )
            ],
            "preprocessed",
        )
        base_role = "bundle_union"

    out[f"core_{base_role}.json"] = core_stats(base)
    out[f"temporal_{base_role}.json"] = temporal_stats(base)
    out[f"repeats_{base_role}.json"] = repeat_stats(base)

    roles = {r: bundle.subset(r) for r in BUNDLE_ROLES}
    for role, sub in roles.items():
        if len(sub) == 0:
            continue
        out[f"core_{role}.json"] = core_stats(sub)
        out[f"temporal_{role}.json"] = temporal_stats(sub)
        out[f"repeats_{role}.json"] = repeat_stats(sub)

    tl_logs = {r: sub for r, sub in roles.items() if len(sub)}
    out["timeline.json"] = timeline(tl_logs, args.granularity, _parse_date_range(args))

    diag_for_summary = []
    for side in ("validation", "test"):
        leak = leakage(bundle, side, args.granularity)
        cold = cold_start(bundle, side, args.granularity)
        out[f"leakage_{side}.json"] = leak
        out[f"coldstart_{side}.json"] = cold
        shift = None
        try:
            shift = distribution_shift(bundle, base, side)
            out[f"shift_{side}.json"] = shift
        except (EmptyTargets, EmptyReference):
            pass
        if side == "test":
            diag_for_summary += [leak, cold] + ([shift] if shift else [])

    summary = summarize(
        [out[f"temporal_{base_role}.json"], out[f"repeats_{base_role}.json"]] + diag_for_summary,
        _thresholds(args),
        dataset=dataset_name,
        provenance=bundle.provenance,
        generated_at=_generated_at(args),
    )
    out["summary.json"] = summary

    for name, report in out.items():
        _emit_json(args, name, report)
    if args.format in ("markdown", "both"):
        # markdown carries the source-level stats plus split diagnostics;
        # per-role stat files stay JSON-only to keep the document readable
        per_role = tuple(f"{kind}_{role}.json" for role in BUNDLE_ROLES
                         for kind in ("core", "temporal", "repeats"))
        details = [v for k, v in out.items() if k != "summary.json" and k not in per_role]
        doc = render_markdown(summary, details)
        _write(args.out_dir, "audit.md", doc.encode("utf-8"))

    if args.fail_on_alert and summary.worst_status() == "alert":
        return 2
    return 0


def cmd_audit(args) -> int:
    if args.bundle_dir:
        bundle = load_bundle(args.bundle_dir, args.prefix)
        name = args.dataset_name or os.path.basename(os.path.normpath(args.bundle_dir))
        return _audit_bundle(args, bundle, None, name, None)
    pre = _preprocess_spec(args)  # flag validation precedes any I/O
    spec = _split_spec(args)
    raw = _parse_input(args)
    validation = ValidationReport(tuple(validate_log(raw)))
    prepared = apply_preprocessing(raw, pre)
    provenance = f"{os.path.basename(args.input)}|{pre.describe()}"
    bundle = make_split(prepared, spec, provenance)
    name = args.dataset_name or os.path.basename(args.input)
    return _audit_bundle(args, bundle, prepared, name, validation)


def cmd_compare(args) -> int:
    bundles = [load_bundle(d, args.prefix) for d in args.bundle]
    if args.input and args.split_spec:
        raw = _parse_input(args)
        pre = _preprocess_spec(args)
        prepared = apply_preprocessing(raw, pre)
        provenance = f"{os.path.basename(args.input)}|{pre.describe()}"
        for spec_path in args.split_spec:
            with open(spec_path, "r", encoding="utf-8") as fh:
                spec = SplitSpec.from_dict(json.load(fh))
            bundles.append(make_split(prepared, spec, provenance))
    if len(bundles) < 2:
        raise AuditError("compare needs at least two bundles (--bundle and/or --split-spec)")
    matrix = compare_splits(
        bundles,
        eval_side=args.eval_side,
        on_provenance_mismatch="warn" if args.allow_provenance_mismatch else "error",
    )
    _emit_json(args, "comparison.json", matrix)
    if args.format in ("markdown", "both"):
        _write(args.out_dir, "comparison.md", (matrix.to_markdown() + "\n").encode("utf-8"))
    print(matrix.to_text())
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .server import ServerConfig, create_app

    app = create_app(
        ServerConfig(
            cors_origins=tuple(args.cors_origin) if args.cors_origin else ("*",),
            max_upload_bytes=args.max_upload_bytes,
            persist_dir=args.persist_dir,
        )
    )
    uvicorn.run(app, host=args.host, port=args.port)
    return 0


COMMANDS = {
    "stats": cmd_stats,
    "split": cmd_split,
    "audit": cmd_audit,
    "compare": cmd_compare,
    "serve": cmd_serve,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code or 0
    try:
        return COMMANDS[args.command](args)
    except (AuditError, FileNotFoundError, ValueError) as exc:
        print(f"splitaudit {args.command}: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
