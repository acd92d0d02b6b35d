"""Dataset-level statistics: core counts, temporal behaviour, repeats, timelines.

All numeric conventions that the reports depend on are fixed here:

* quantiles use linear interpolation between order statistics;
* histograms use Freedman-Diaconis widths capped at 100 bins; duration-like
  quantities additionally get log1p-spaced bins (long tails);
* the collision rate counts colliding interactions (members of same-user
  same-timestamp groups of size >= 2) over all interactions;
* JSON output keeps raw milliseconds; only rendered text uses human units.
"""
from __future__ import annotations

from dataclasses import dataclass, fields as dc_fields
from datetime import datetime, timezone
from typing import Mapping

import numpy as np

from .errors import EmptyLog, InvalidRange, TypeMismatch
from .log import InteractionLog

QUANTILE_LEVELS = (0.05, 0.25, 0.5, 0.75, 0.95)
MAX_HISTOGRAM_BINS = 100

COLLISION_DEFINITION = (
    "share of interactions belonging to a same-user, same-timestamp group of "
    "size >= 2, over all interactions"
)

GRANULARITY_MS = {"hour": 3_600_000, "day": 86_400_000}
GRANULARITIES = ("hour", "day", "week", "month")


@dataclass(frozen=True)
class DistributionSummary:
    """Five-number-plus summary of a per-entity aggregate.

    histogram bins are (lower, upper, count) with the last bin closed on the
    right; log_histogram (log1p-spaced edges) is populated for duration-like
    quantities only. Counts always sum to `count`.
    """

    count: int
    mean: float | None
    min: float | None
    max: float | None
    quantiles: tuple[tuple[float, float], ...]
    histogram: tuple[tuple[float, float, int], ...]
    log_histogram: tuple[tuple[float, float, int], ...] | None = None


@dataclass(frozen=True)
class CoreStatsReport:
    n_users: int
    n_items: int
    n_interactions: int
    avg_seq_len: float
    density_pct: float
    popularity: DistributionSummary
    seq_len: DistributionSummary


@dataclass(frozen=True)
class TemporalStatsReport:
    start_ts: int
    end_ts: int
    timeframe_ms: int
    delta_t: DistributionSummary
    collision_rate_pct: float
    user_lifetime: DistributionSummary
    item_lifetime: DistributionSummary
    collision_definition: str = COLLISION_DEFINITION


@dataclass(frozen=True)
class RepeatReport:
    repeated_count: int
    consecutive_count: int
    repeated_interactions_pct: float
    consecutive_repeats_pct: float
    per_user_repeat_share: DistributionSummary


@dataclass(frozen=True)
class TimelineReport:
    granularity: str
    range_start: int
    range_end: int
    buckets: dict[str, tuple[tuple[int, int], ...]]
    excluded: dict[str, int]


@dataclass(frozen=True)
class ComparisonRow:
    field: str
    analysed: float | None
    reference: float | None
    delta_pct: float | None


@dataclass(frozen=True)
class ComparisonTable:
    report_kind: str
    rows: tuple[ComparisonRow, ...]


# ---------------------------------------------------------------------------
# distribution summaries


def _fd_bin_count(values: np.ndarray) -> int:
    n = len(values)
    if n < 2:
        return 1
    q75, q25 = np.quantile(values, [0.75, 0.25])
    iqr = float(q75 - q25)
    span = float(values.max() - values.min())
    if span <= 0:
        return 1
    width = 2.0 * iqr / n ** (1.0 / 3.0)
    if width <= 0:
        return min(MAX_HISTOGRAM_BINS, max(1, int(np.ceil(np.sqrt(n)))))
    return min(MAX_HISTOGRAM_BINS, max(1, int(np.ceil(span / width))))


def _histogram(values: np.ndarray, edges: np.ndarray) -> tuple[tuple[float, float, int], ...]:
    counts, edges = np.histogram(values, bins=edges)
    return tuple(
        (float(edges[i]), float(edges[i + 1]), int(counts[i]))
        for i in range(len(counts))
    )


def distribution_summary(values, log_bins: bool = False) -> DistributionSummary:
    """Summarize a 1-D numeric sample; empty samples yield a count-0 summary."""
    v = np.asarray(values, dtype=np.float64)
    if v.size == 0:
        return DistributionSummary(0, None, None, None, (), (), None)
    lo, hi = float(v.min()), float(v.max())
    qs = np.quantile(v, QUANTILE_LEVELS)
    quantiles = tuple((float(q), float(x)) for q, x in zip(QUANTILE_LEVELS, qs))
    if hi > lo:
        nbins = _fd_bin_count(v)
        hist = _histogram(v, np.linspace(lo, hi, nbins + 1))
    else:
        hist = ((lo, hi, int(v.size)),)
    log_hist = None
    if log_bins:
        if hi > lo:
            tlo, thi = np.log1p(lo), np.log1p(hi)
            nbins = _fd_bin_count(np.log1p(v))
            edges = np.expm1(np.linspace(tlo, thi, nbins + 1))
            edges[0], edges[-1] = lo, hi  # guard endpoint rounding
            if np.any(np.diff(edges) <= 0):  # degenerate float spacing
                log_hist = hist
            else:
                log_hist = _histogram(v, edges)
        else:
            log_hist = hist
    return DistributionSummary(
        int(v.size), float(v.mean()), lo, hi, quantiles, hist, log_hist
    )


# ---------------------------------------------------------------------------
# core / temporal / repeats


def core_stats(log: InteractionLog) -> CoreStatsReport:
    if len(log) == 0:
        raise EmptyLog("core_stats requires a non-empty log")
    n = len(log)
    n_users, n_items = log.n_users, log.n_items
    pop = np.bincount(log.item_codes, minlength=n_items)
    seq = log.user_lengths()
    return CoreStatsReport(
        n_users=n_users,
        n_items=n_items,
        n_interactions=n,
        avg_seq_len=n / n_users,
        density_pct=100.0 * n / (n_users * n_items),
        popularity=distribution_summary(pop),
        seq_len=distribution_summary(seq),
    )


def _within_user_mask(log: InteractionLog) -> np.ndarray:
    """mask[i] true when row i has a predecessor of the same user."""
    m = np.empty(len(log), dtype=bool)
    m[0] = False
    m[1:] = log.user_codes[1:] == log.user_codes[:-1]
    return m


def temporal_stats(log: InteractionLog) -> TemporalStatsReport:
    if len(log) == 0:
        raise EmptyLog("temporal_stats requires a non-empty log")
    ts = log.timestamps
    n = len(log)
    start, end = int(ts.min()), int(ts.max())

    within = _within_user_mask(log)
    deltas = (ts[1:] - ts[:-1])[within[1:]]

    # canonical order puts a user's equal timestamps adjacent
    collide_with_prev = np.zeros(n, dtype=bool)
    collide_with_prev[1:] = within[1:] & (ts[1:] == ts[:-1])
    colliding = collide_with_prev.copy()
    colliding[:-1] |= collide_with_prev[1:]

    starts = log.user_starts
    user_life = ts[starts[1:] - 1] - ts[starts[:-1]] if log.n_users else np.empty(0, np.int64)

    item_first = np.full(log.n_items, np.iinfo(np.int64).max, dtype=np.int64)
    item_last = np.full(log.n_items, np.iinfo(np.int64).min, dtype=np.int64)
    np.minimum.at(item_first, log.item_codes, ts)
    np.maximum.at(item_last, log.item_codes, ts)
    item_life = item_last - item_first

    return TemporalStatsReport(
        start_ts=start,
        end_ts=end,
        timeframe_ms=end - start,
        delta_t=distribution_summary(deltas, log_bins=True),
        collision_rate_pct=100.0 * int(colliding.sum()) / n,
        user_lifetime=distribution_summary(user_life, log_bins=True),
        item_lifetime=distribution_summary(item_life, log_bins=True),
    )


def repeat_stats(log: InteractionLog) -> RepeatReport:
    if len(log) == 0:
        raise EmptyLog("repeat_stats requires a non-empty log")
    n = len(log)
    within = _within_user_mask(log)
    consecutive = int((within & (np.r_[False, log.item_codes[1:] == log.item_codes[:-1]])).sum())

    # repeated = seq_len - distinct items, per user
    pair_key = log.user_codes * max(log.n_items, 1) + log.item_codes
    unique_pairs = np.unique(pair_key)
    distinct_per_user = np.bincount(unique_pairs // max(log.n_items, 1), minlength=log.n_users)
    seq = log.user_lengths()
    repeated_per_user = seq - distinct_per_user
    repeated = int(repeated_per_user.sum())

    share = 100.0 * repeated_per_user / seq
    return RepeatReport(
        repeated_count=repeated,
        consecutive_count=consecutive,
        repeated_interactions_pct=100.0 * repeated / n,
        consecutive_repeats_pct=100.0 * consecutive / n,
        per_user_repeat_share=distribution_summary(share),
    )


# ---------------------------------------------------------------------------
# timeline


def _epoch_day_floor(ts_ms: np.ndarray) -> np.ndarray:
    return ts_ms // GRANULARITY_MS["day"] * GRANULARITY_MS["day"]


def bucket_floor(ts_ms: np.ndarray, granularity: str) -> np.ndarray:
    """Floor epoch-ms timestamps to UTC calendar boundaries."""
    ts_ms = np.asarray(ts_ms, dtype=np.int64)
    if granularity in GRANULARITY_MS:
        unit = GRANULARITY_MS[granularity]
        return ts_ms // unit * unit
    if granularity == "week":  # ISO weeks start on Monday; epoch day 0 is a Thursday
        days = ts_ms // GRANULARITY_MS["day"]
        monday = days - (days + 3) % 7
        return monday * GRANULARITY_MS["day"]
    if granularity == "month":
        months = ts_ms.astype("datetime64[ms]").astype("datetime64[M]")
        return months.astype("datetime64[ms]").astype(np.int64)
    raise ValueError(f"unknown granularity {granularity!r}")


def timeline(
    logs: Mapping[str, InteractionLog],
    granularity: str = "day",
    date_range: tuple[int, int] | None = None,
) -> TimelineReport:
    """Bucket interaction counts per subset role at a calendar granularity.

    Only non-empty buckets are listed (renderers zero-fill); interactions
    outside the range are excluded and counted per role.
    """
    if granularity not in GRANULARITIES:
        raise ValueError(f"granularity must be one of {GRANULARITIES}")
    if date_range is None:
        all_ts = [log.timestamps for log in logs.values() if len(log)]
        if not all_ts:
            raise EmptyLog("timeline requires at least one non-empty log")
        start = int(min(a.min() for a in all_ts))
        end = int(max(a.max() for a in all_ts))
    else:
        start, end = int(date_range[0]), int(date_range[1])
        if start > end:
            raise InvalidRange(f"range start {start} > end {end}")

    buckets: dict[str, tuple[tuple[int, int], ...]] = {}
    excluded: dict[str, int] = {}
    for role, log in logs.items():
        ts = log.timestamps
        in_range = (ts >= start) & (ts <= end)
        excluded[role] = int((~in_range).sum())
        if not in_range.any():
            buckets[role] = ()
            continue
        floored = bucket_floor(ts[in_range], granularity)
        uniq, counts = np.unique(floored, return_counts=True)
        buckets[role] = tuple((int(b), int(c)) for b, c in zip(uniq, counts))
    return TimelineReport(granularity, start, end, buckets, excluded)


# ---------------------------------------------------------------------------
# report comparison


def _numeric_fields(report) -> list[tuple[str, float]]:
    out: list[tuple[str, float]] = []
    for f in dc_fields(report):
        v = getattr(report, f.name)
        if isinstance(v, bool):
            continue
        if isinstance(v, (int, float)):
            out.append((f.name, float(v)))
        elif isinstance(v, DistributionSummary):
            for sub in ("count", "mean", "min", "max"):
                x = getattr(v, sub)
                if x is not None:
                    out.append((f"{f.name}.{sub}", float(x)))
            for q, x in v.quantiles:
                out.append((f"{f.name}.q{q:g}", float(x)))
    return out


def compare_stats(analysed, reference) -> ComparisonTable:
    """Field-by-field comparison of two reports of the same type."""
    if type(analysed) is not type(reference):
        raise TypeMismatch(
            f"cannot compare {type(analysed).__name__} with {type(reference).__name__}"
        )
    a_fields = dict(_numeric_fields(analysed))
    r_fields = dict(_numeric_fields(reference))
    rows = []
    for name, a_val in _numeric_fields(analysed):
        r_val = r_fields.get(name)
        delta = None
        if r_val is not None and r_val != 0:
            delta = 100.0 * (a_val - r_val) / r_val
        rows.append(ComparisonRow(name, a_val, r_val, delta))
    for name, r_val in _numeric_fields(reference):
        if name not in a_fields:
            rows.append(ComparisonRow(name, None, r_val, None))
    return ComparisonTable(type(analysed).__name__, tuple(rows))


def format_duration(ms: float | None) -> str:
    """Adaptive human units for rendered text; JSON always keeps raw ms."""
    if ms is None:
        return "n/a"
    s = ms / 1000.0
    if s < 60:
        return f"{s:.2f} s"
    if s < 3600:
        return f"{s / 60:.2f} m"
    if s < 86400:
        return f"{s / 3600:.2f} h"
    if s < 31557600:
        return f"{s / 86400:.2f} d"
    return f"{s / 31557600:.2f} y"


def _format_duration_impl(ms: float | None) -> str:
    if ms is None:
        return "n/a"
    s = ms / 1000.0
    if s < 60:
        return f"{s:.2f} s"
    if s < 3600:
        return f"{s / 60:.2f} m"
    if s < 86400:
        return f"{s / 3600:.2f} h"
    if s < 31557600:
        return f"{s / 86400:.2f} d"
    return f"{s / 31557600:.2f} y"


def utc_date(ts_ms: int) -> str:
    return datetime.fromtimestamp(ts_ms / 1000.0, tz=timezone.utc).strftime("%Y-%m-%d")
