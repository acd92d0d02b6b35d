"""Threshold-evaluated summaries and Markdown audit documents.

The summary consolidates every available diagnostic into color-coded cards
(ok / warn / alert / not_applicable). Thresholds are configurable; the
defaults shipped here are opinionated starting points chosen to flag the
problem patterns the diagnostics are built to expose (heavy timestamp
collisions, leakage under leave-one-out, high cold-item exposure), not
ground truth.
"""
from __future__ import annotations

from dataclasses import dataclass, fields as dc_fields

from . import __version__
from .diagnostics import (
    ColdStartReport,
    LeakageReport,
    ShiftReport,
    SplitComparisonMatrix,
    SplitComparisonRow,
    ShareBucket,
)
from .log import ValidationReport, Violation
from .serialize import register_report
from .split import RoleSummary, SplitDescription
from .stats import (
    ComparisonRow,
    ComparisonTable,
    CoreStatsReport,
    DistributionSummary,
    RepeatReport,
    TemporalStatsReport,
    TimelineReport,
    format_duration,
    utc_date,
)


@dataclass(frozen=True)
class ThresholdConfig:
    """(warn, alert) levels per metric.

    For the min_eval_* metrics low values are bad, so warn >= alert there;
    everywhere else high values are bad and warn <= alert.
    """

    collision_rate_pct: tuple[float, float] = (1.0, 20.0)
    consecutive_repeats_pct: tuple[float, float] = (1.0, 10.0)
    leaked_target_pct: tuple[float, float] = (0.1, 5.0)
    cold_items_pct: tuple[float, float] = (5.0, 25.0)
    cold_users_pct: tuple[float, float] = (25.0, 75.0)
    timegap_ks: tuple[float, float] = (0.1, 0.3)
    position_ks: tuple[float, float] = (0.1, 0.3)
    min_eval_users: tuple[float, float] = (1000.0, 100.0)
    min_eval_interactions: tuple[float, float] = (1000.0, 100.0)

    def __post_init__(self):
        for f in dc_fields(self):
            warn, alert = getattr(self, f.name)
            if f.name in LOW_IS_BAD:
                if warn < alert:
                    raise ValueError(f"{f.name}: warn must be >= alert for low-is-bad metrics")
            elif warn > alert:
                raise ValueError(f"{f.name}: warn must be <= alert")


LOW_IS_BAD = frozenset({"min_eval_users", "min_eval_interactions"})

# card order is the fixed metric list order; links name dashboard pages
CARD_METRICS = (
    ("collision_rate_pct", "core_temporal"),
    ("consecutive_repeats_pct", "repeats"),
    ("leaked_target_pct", "leakage"),
    ("cold_users_pct", "cold_start"),
    ("cold_items_pct", "cold_start"),
    ("timegap_ks", "shift"),
    ("position_ks", "shift"),
    ("min_eval_users", "core_temporal"),
    ("min_eval_interactions", "core_temporal"),
)


@dataclass(frozen=True)
class Card:
    metric: str
    value: float | None
    status: str
    link_to_detail: str


@dataclass(frozen=True)
class SummaryReport:
    cards: tuple[Card, ...]
    dataset: str
    provenance: str
    version: str
    generated_at: int | None

    def worst_status(self) -> str:
        order = {"ok": 0, "not_applicable": 0, "warn": 1, "alert": 2}
        worst = "ok"
        for card in self.cards:
            if order[card.status] > order[worst]:
                worst = card.status
        return worst


def card_status(metric: str, value: float | None, thresholds: ThresholdConfig) -> str:
    if value is None:
        return "not_applicable"
    warn, alert = getattr(thresholds, metric)
    if metric in LOW_IS_BAD:
        if value <= alert:
            return "alert"
        if value <= warn:
            return "warn"
        return "ok"
    if value >= alert:
        return "alert"
    if value >= warn:
        return "warn"
    return "ok"


def summarize(
    reports,
    thresholds: ThresholdConfig | None = None,
    dataset: str = "",
    provenance: str = "",
    generated_at: int | None = None,
) -> SummaryReport:
    """One card per threshold metric; missing diagnostics yield not_applicable.

    `reports` is any iterable of diagnostic reports; the first report of each
    type supplies that type's metrics. The cold-items card carries the share
    of target interactions on cold items (the headline exposure number); the
    distinct-item share stays in the detail report.
    """
    reports = list(reports)
    if not reports:
        raise ValueError("summarize requires at least one report")
    thresholds = thresholds or ThresholdConfig()
    by_type: dict[type, object] = {}
    for r in reports:
        by_type.setdefault(type(r), r)

    temporal = by_type.get(TemporalStatsReport)
    repeats = by_type.get(RepeatReport)
    leak = by_type.get(LeakageReport)
    cold = by_type.get(ColdStartReport)
    shift = by_type.get(ShiftReport)

    values: dict[str, float | None] = {
        "collision_rate_pct": temporal.collision_rate_pct if temporal else None,
        "consecutive_repeats_pct": repeats.consecutive_repeats_pct if repeats else None,
        "leaked_target_pct": leak.leaked_target_pct if leak else None,
        "cold_users_pct": cold.cold_users_pct if cold else None,
        "cold_items_pct": cold.cold_interactions_pct if cold else None,
        "timegap_ks": shift.timegap_ks if shift else None,
        "position_ks": shift.position_ks if shift else None,
        "min_eval_users": float(cold.n_eval_users) if cold else None,
        "min_eval_interactions": float(cold.n_target_interactions) if cold else None,
    }
    cards = tuple(
        Card(metric, values[metric], card_status(metric, values[metric], thresholds), link)
        for metric, link in CARD_METRICS
    )
    return SummaryReport(
        cards=cards,
        dataset=dataset,
        provenance=provenance,
        version=__version__,
        generated_at=generated_at,
    )


# ---------------------------------------------------------------------------
# registry

for _cls in (
    DistributionSummary,
    CoreStatsReport,
    TemporalStatsReport,
    RepeatReport,
    TimelineReport,
    ComparisonRow,
    ComparisonTable,
    ShareBucket,
    LeakageReport,
    ColdStartReport,
    ShiftReport,
    RoleSummary,
    SplitDescription,
    SplitComparisonRow,
    SplitComparisonMatrix,
    Violation,
    ValidationReport,
    Card,
    SummaryReport,
    ThresholdConfig,
):
    register_report(_cls)


# ---------------------------------------------------------------------------
# markdown rendering

_STATUS_MARK = {"ok": "ok", "warn": "WARN", "alert": "ALERT", "not_applicable": "n/a"}

DEFINITIONS = (
    ("collision rate", "share of interactions in same-user, same-timestamp groups of size >= 2"),
    ("n-core", "iterative filter counting interactions per user/item, not distinct partners"),
    ("leaked targets", "targets timestamped strictly before the latest training interaction"),
    ("item-leaked targets", "targets with a strictly later training interaction on the same item"),
    ("shared interactions", "identical (user, item, timestamp) rows in train and the eval target subset"),
    ("temporal overlap", "length of train-window/eval-window intersection over the eval window length"),
    ("cold user / item", "evaluation user or target item absent from the training subset"),
    ("time gap", "target timestamp minus the user's last input timestamp"),
    ("target position", "1-based target index over the user's full input+target length"),
)


def _fmt(v) -> str:
    if v is None:
        return "n/a"
    if isinstance(v, bool):
        return "yes" if v else "no"
    if isinstance(v, float):
        return f"{v:.4f}"
    return str(v)


def _summary_table(s: DistributionSummary, duration: bool = False) -> list[str]:
    conv = format_duration if duration else _fmt
    cells = [("count", str(s.count)), ("mean", conv(s.mean)), ("min", conv(s.min)), ("max", conv(s.max))]
    cells += [(f"q{q:g}", conv(x)) for q, x in s.quantiles]
    head = "| " + " | ".join(c[0] for c in cells) + " |"
    sep = "|" + "|".join(" --- " for _ in cells) + "|"
    body = "| " + " | ".join(c[1] for c in cells) + " |"
    return [head, sep, body]


def _kv_table(pairs) -> list[str]:
    lines = ["| metric | value |", "| --- | --- |"]
    lines += [f"| {k} | {v} |" for k, v in pairs]
    return lines


def render_markdown(summary: SummaryReport, details=()) -> str:
    """Deterministic audit document: summary cards, then detail sections."""
    lines = [f"# Data audit: {summary.dataset or 'unnamed dataset'}", ""]
    lines.append(f"- provenance: {summary.provenance or 'n/a'}")
    lines.append(f"- toolkit version: {summary.version}")
    if summary.generated_at is not None:
        lines.append(f"- generated at: {summary.generated_at} (epoch ms)")
    lines += ["", "## Summary", ""]
    lines.append("| metric | value | status | details |")
    lines.append("| --- | --- | --- | --- |")
    for card in summary.cards:
        lines.append(
            f"| {card.metric} | {_fmt(card.value)} | {_STATUS_MARK[card.status]} | {card.link_to_detail} |"
        )
    lines.append("")

    order = {
        CoreStatsReport: 0,
        TemporalStatsReport: 1,
        RepeatReport: 2,
        TimelineReport: 3,
        LeakageReport: 4,
        ColdStartReport: 5,
        ShiftReport: 6,
        ComparisonTable: 7,
        SplitDescription: 8,
        SplitComparisonMatrix: 9,
        ValidationReport: 10,
    }
    details = sorted(
        (d for d in details if type(d) in order),
        key=lambda d: order[type(d)],
    )
    for d in details:
        lines += _render_detail(d)

    lines += ["## Definitions", ""]
    for term, text in DEFINITIONS:
        lines.append(f"- **{term}**: {text}")
    lines.append("")
    return "\n".join(lines)


def _render_detail(d) -> list[str]:
    out: list[str] = []
    if isinstance(d, CoreStatsReport):
        out += ["## Core statistics", ""]
        out += _kv_table(
            [
                ("users", d.n_users),
                ("items", d.n_items),
                ("interactions", d.n_interactions),
                ("avg sequence length", f"{d.avg_seq_len:.2f}"),
                ("density (%)", f"{d.density_pct:.4f}"),
            ]
        )
        out += ["", "Per-item popularity:", ""] + _summary_table(d.popularity)
        out += ["", "Per-user sequence length:", ""] + _summary_table(d.seq_len)
        out.append("")
    elif isinstance(d, TemporalStatsReport):
        out += ["## Temporal statistics", ""]
        out += _kv_table(
            [
                ("start", utc_date(d.start_ts)),
                ("end", utc_date(d.end_ts)),
                ("timeframe", format_duration(d.timeframe_ms)),
                ("timestamp collision rate (%)", f"{d.collision_rate_pct:.4f}"),
            ]
        )
        out += ["", "Time delta between interactions:", ""] + _summary_table(d.delta_t, duration=True)
        out += ["", "User lifetime:", ""] + _summary_table(d.user_lifetime, duration=True)
        out += ["", "Item lifetime:", ""] + _summary_table(d.item_lifetime, duration=True)
        out.append("")
    elif isinstance(d, RepeatReport):
        out += ["## Repeat consumption", ""]
        out += _kv_table(
            [
                ("repeated interactions", f"{d.repeated_count} ({d.repeated_interactions_pct:.2f}%)"),
                ("consecutive repeats", f"{d.consecutive_count} ({d.consecutive_repeats_pct:.2f}%)"),
            ]
        )
        out += ["", "Per-user repeated share (%):", ""] + _summary_table(d.per_user_repeat_share)
        out.append("")
    elif isinstance(d, TimelineReport):
        out += ["## Interactions over time", ""]
        out.append(f"Granularity: {d.granularity}; range {utc_date(d.range_start)} to {utc_date(d.range_end)}.")
        out.append("")
        for role in sorted(d.buckets):
            buckets = d.buckets[role]
            total = sum(c for _, c in buckets)
            out.append(f"- {role}: {total} in range, {d.excluded.get(role, 0)} excluded, {len(buckets)} buckets")
        out.append("")
    elif isinstance(d, LeakageReport):
        out += [f"## Temporal leakage ({d.eval_side})", ""]
        out += _kv_table(
            [
                ("shared interactions", d.shared_interactions),
                ("temporal overlap (%)", f"{d.overlap_pct:.2f}"),
                ("leaked targets (%)", f"{d.leaked_target_pct:.2f}"),
                ("item-leaked targets (%)", f"{d.leaked_item_target_pct:.2f}"),
                ("targets", d.n_targets),
            ]
        )
        out.append("")
    elif isinstance(d, ColdStartReport):
        out += [f"## Cold start ({d.eval_side})", ""]
        out += _kv_table(
            [
                ("eval users", d.n_eval_users),
                ("cold users", f"{d.cold_users} ({d.cold_users_pct:.2f}%)"),
                ("target items", d.n_target_items),
                ("cold items", f"{d.cold_items} ({d.cold_items_pct:.2f}%)"),
                ("target interactions", d.n_target_interactions),
                ("cold-item interactions", f"{d.cold_interactions} ({d.cold_interactions_pct:.2f}%)"),
            ]
        )
        out.append("")
    elif isinstance(d, ShiftReport):
        out += [f"## Distribution shift ({d.eval_side})", ""]
        out += _kv_table(
            [
                ("time-gap KS", _fmt(d.timegap_ks)),
                ("position KS", _fmt(d.position_ks)),
                ("eval gaps / reference gaps", f"{d.n_eval_gaps} / {d.n_reference_gaps}"),
                ("targets without input", d.excluded_empty_input_targets),
            ]
        )
        out += ["", "Target time gaps:", ""] + _summary_table(d.eval_gaps, duration=True)
        out += ["", "Reference time gaps:", ""] + _summary_table(d.reference_gaps, duration=True)
        out.append("")
    elif isinstance(d, ComparisonTable):
        out += [f"## Comparison vs reference ({d.report_kind})", ""]
        out.append("| field | analysed | reference | delta % |")
        out.append("| --- | --- | --- | --- |")
        for row in d.rows:
            out.append(
                f"| {row.field} | {_fmt(row.analysed)} | {_fmt(row.reference)} | {_fmt(row.delta_pct)} |"
            )
        out.append("")
    elif isinstance(d, SplitDescription):
        out += ["## Split description", ""]
        out.append(f"Strategy: {d.strategy}; provenance: {d.provenance or 'n/a'}.")
        out.append("")
        out.append("| role | users | items | interactions | start | end |")
        out.append("| --- | --- | --- | --- | --- | --- |")
        for role, r in d.roles.items():
            start = utc_date(r.start_ts) if r.start_ts is not None else "n/a"
            end = utc_date(r.end_ts) if r.end_ts is not None else "n/a"
            out.append(f"| {role} | {r.n_users} | {r.n_items} | {r.n_interactions} | {start} | {end} |")
        out.append("")
        out.append(
            f"Evaluation users with empty inputs (cold by construction): "
            f"validation {d.empty_input_users_val}, test {d.empty_input_users_test}."
        )
        out.append("")
    elif isinstance(d, SplitComparisonMatrix):
        out += [f"## Split comparison ({d.eval_side})", "", d.to_markdown(), ""]
    elif isinstance(d, ValidationReport):
        out += ["## Validation", ""]
        if not d.violations:
            out.append("No invariant violations.")
        else:
            out.append("| invariant | ordinal | message |")
            out.append("| --- | --- | --- |")
            for v in d.violations:
                out.append(f"| {v.invariant} | {v.ordinal} | {v.message} |")
        out.append("")
    return out
