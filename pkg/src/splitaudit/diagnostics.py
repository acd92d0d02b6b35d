"""Split-level diagnostics: temporal leakage, cold-start exposure,
distribution shift, and multi-split comparison.

Leakage definitions (both reported, since a single "leaked share" is
ambiguous): a target is train-future-exposed when its timestamp is strictly
earlier than the latest training timestamp, and item-exposed when some
training interaction with the same item happens strictly later. Shared
interactions compare train against the evaluation *target* rows: by source
row when the bundle preserves row identity (a row assigned to both subsets
is the bug being audited), otherwise by (user, item, timestamp) multiset
intersection, which upper-bounds row sharing for external bundles whose
logs may contain genuinely duplicated events.
"""
from __future__ import annotations

import warnings
from collections import Counter
from dataclasses import dataclass

import numpy as np

from .errors import (
    EmptyReference,
    EmptySample,
    EmptyTargets,
    ProvenanceMismatch,
)
from .log import InteractionLog
from .split import SplitBundle, SplitDescription, describe_split
from .stats import DistributionSummary, bucket_floor, distribution_summary


@dataclass(frozen=True)
class ShareBucket:
    """One time bucket of a share-over-time series."""

    bucket_start: int
    n_targets: int
    n_affected: int
    share_pct: float


@dataclass(frozen=True)
class LeakageReport:
    eval_side: str
    shared_interactions: int
    shared_basis: str
    overlap_pct: float
    leaked_target_pct: float
    leaked_item_target_pct: float
    n_targets: int
    leaked_over_time: tuple[ShareBucket, ...]
    granularity: str
    empty_targets: bool


@dataclass(frozen=True)
class ColdStartReport:
    eval_side: str
    n_eval_users: int
    cold_users: int
    cold_users_pct: float
    n_target_items: int
    cold_items: int
    cold_items_pct: float
    n_target_interactions: int
    cold_interactions: int
    cold_interactions_pct: float
    cold_over_time: tuple[ShareBucket, ...]
    granularity: str
    empty_targets: bool


@dataclass(frozen=True)
class ShiftReport:
    eval_side: str
    timegap_ks: float | None
    position_ks: float
    n_eval_gaps: int
    n_reference_gaps: int
    n_eval_positions: int
    n_reference_positions: int
    excluded_empty_input_targets: int
    eval_gaps: DistributionSummary
    reference_gaps: DistributionSummary
    eval_positions: DistributionSummary
    reference_positions: DistributionSummary


@dataclass(frozen=True)
class SplitComparisonRow:
    label: str
    strategy: str
    description: SplitDescription
    n_train: int
    n_val_target: int
    n_test_target: int
    n_eval_users: int
    shared_interactions: int
    overlap_pct: float
    leaked_target_pct: float
    cold_users_pct: float
    cold_items_pct: float
    cold_interactions_pct: float
    timegap_ks: float | None
    position_ks: float | None


@dataclass(frozen=True)
class SplitComparisonMatrix:
    eval_side: str
    provenance: str
    rows: tuple[SplitComparisonRow, ...]

    _COLUMNS = (
        ("label", "split"),
        ("n_train", "train"),
        ("n_val_target", "val tgt"),
        ("n_test_target", "test tgt"),
        ("n_eval_users", "eval users"),
        ("shared_interactions", "shared"),
        ("overlap_pct", "overlap %"),
        ("leaked_target_pct", "leaked %"),
        ("cold_users_pct", "cold users %"),
        ("cold_items_pct", "cold items %"),
        ("cold_interactions_pct", "cold inter %"),
        ("timegap_ks", "gap KS"),
        ("position_ks", "pos KS"),
    )

    def _cells(self) -> list[list[str]]:
        def fmt(v):
            if v is None:
                return "n/a"
            if isinstance(v, float):
                return f"{v:.4f}"
            return str(v)

        head = [h for _, h in self._COLUMNS]
        body = [[fmt(getattr(r, f)) for f, _ in self._COLUMNS] for r in self.rows]
        return [head] + body

    def to_text(self) -> str:
        cells = self._cells()
        widths = [max(len(row[i]) for row in cells) for i in range(len(cells[0]))]
        lines = []
        for j, row in enumerate(cells):
            lines.append("  ".join(c.rjust(w) for c, w in zip(row, widths)))
            if j == 0:
                lines.append("  ".join("-" * w for w in widths))
        return "\n".join(lines)

    def to_markdown(self) -> str:
        cells = self._cells()
        lines = ["| " + " | ".join(cells[0]) + " |"]
        lines.append("|" + "|".join(" --- " for _ in cells[0]) + "|")
        for row in cells[1:]:
            lines.append("| " + " | ".join(row) + " |")
        return "\n".join(lines)


# ---------------------------------------------------------------------------
# Kolmogorov-Smirnov


def ks_statistic(sample_a, sample_b) -> float:
    """Two-sample KS statistic: sup |F_a - F_b| over the pooled sample points.

    The raw statistic only; no asymptotics, no p-value.
    """
    a = np.sort(np.asarray(sample_a, dtype=np.float64))
    b = np.sort(np.asarray(sample_b, dtype=np.float64))
    if a.size == 0 or b.size == 0:
        raise EmptySample("ks_statistic requires two non-empty samples")
    support = np.concatenate([a, b])
    cdf_a = np.searchsorted(a, support, side="right") / a.size
    cdf_b = np.searchsorted(b, support, side="right") / b.size
    return float(np.abs(cdf_a - cdf_b).max())


# ---------------------------------------------------------------------------
# leakage


def _share_over_time(
    target_ts: np.ndarray, affected: np.ndarray, granularity: str
) -> tuple[ShareBucket, ...]:
    if len(target_ts) == 0:
        return ()
    floored = bucket_floor(target_ts, granularity)
    uniq, inverse = np.unique(floored, return_inverse=True)
    totals = np.bincount(inverse, minlength=len(uniq))
    hits = np.bincount(inverse, weights=affected.astype(np.float64), minlength=len(uniq))
    return tuple(
        ShareBucket(int(b), int(t), int(h), 100.0 * h / t)
        for b, t, h in zip(uniq, totals, hits)
    )


def _row_triples(log: InteractionLog) -> list[tuple[str, str, int]]:
    return [
        (log.users[uc], log.items[ic], int(ts))
        for uc, ic, ts in zip(log.user_codes, log.item_codes, log.timestamps)
    ]


def leakage(bundle: SplitBundle, eval_side: str = "test", granularity: str = "day") -> LeakageReport:
    inp, tgt = bundle.eval_pair(eval_side)
    train = bundle.train
    basis = "source_rows" if bundle.row_identity == "ordinal" else "attribute_triples"
    if len(tgt) == 0:
        return LeakageReport(eval_side, 0, basis, 0.0, 0.0, 0.0, 0, (), granularity, True)

    if basis == "source_rows":
        # ordinals name source rows, so sharing means literal double-assignment
        shared = int(np.isin(tgt.ordinals, train.ordinals).sum())
    else:
        # external bundles: attribute multiset intersection (upper bound)
        train_counts = Counter(_row_triples(train))
        shared = 0
        for triple, k in Counter(_row_triples(tgt)).items():
            shared += min(k, train_counts.get(triple, 0))

    # temporal overlap against the eval window (input plus target)
    eval_ts = (
        np.concatenate([inp.timestamps, tgt.timestamps]) if len(inp) else tgt.timestamps
    )
    e_min, e_max = int(eval_ts.min()), int(eval_ts.max())
    if len(train):
        t_min, t_max = int(train.timestamps.min()), int(train.timestamps.max())
        inter = min(t_max, e_max) - max(t_min, e_min)
        if e_max == e_min:
            overlap = 100.0 if t_min <= e_min <= t_max else 0.0
        else:
            overlap = 100.0 * max(0, inter) / (e_max - e_min)
    else:
        overlap = 0.0

    n_targets = len(tgt)
    if len(train):
        t_last = int(train.timestamps.max())
        leaked = tgt.timestamps < t_last

        last_by_code = np.full(train.n_items, np.iinfo(np.int64).min, dtype=np.int64)
        np.maximum.at(last_by_code, train.item_codes, train.timestamps)
        item_last = {item: int(t) for item, t in zip(train.items, last_by_code)}
        leaked_item = np.fromiter(
            (
                item_last.get(tgt.items[ic], -1) > int(ts)
                for ic, ts in zip(tgt.item_codes, tgt.timestamps)
            ),
            dtype=bool,
            count=n_targets,
        )
    else:
        leaked = np.zeros(n_targets, dtype=bool)
        leaked_item = np.zeros(n_targets, dtype=bool)

    return LeakageReport(
        eval_side=eval_side,
        shared_interactions=shared,
        shared_basis=basis,
        overlap_pct=overlap,
        leaked_target_pct=100.0 * int(leaked.sum()) / n_targets,
        leaked_item_target_pct=100.0 * int(leaked_item.sum()) / n_targets,
        n_targets=n_targets,
        leaked_over_time=_share_over_time(tgt.timestamps, leaked, granularity),
        granularity=granularity,
        empty_targets=False,
    )


# ---------------------------------------------------------------------------
# cold start


def cold_start(bundle: SplitBundle, eval_side: str = "test", granularity: str = "day") -> ColdStartReport:
    inp, tgt = bundle.eval_pair(eval_side)
    train = bundle.train
    if len(tgt) == 0 and len(inp) == 0:
        return ColdStartReport(
            eval_side, 0, 0, 0.0, 0, 0, 0.0, 0, 0, 0.0, (), granularity, True
        )

    train_users = set(train.users)
    train_items = set(train.items)

    eval_users = set(tgt.users) | set(inp.users)
    cold_users = sum(1 for u in eval_users if u not in train_users)

    target_items = set(tgt.items)
    cold_item_set = {i for i in target_items if i not in train_items}

    cold_rows = np.fromiter(
        (tgt.items[ic] in cold_item_set for ic in tgt.item_codes),
        dtype=bool,
        count=len(tgt),
    )
    n_targets = len(tgt)
    return ColdStartReport(
        eval_side=eval_side,
        n_eval_users=len(eval_users),
        cold_users=cold_users,
        cold_users_pct=100.0 * cold_users / len(eval_users) if eval_users else 0.0,
        n_target_items=len(target_items),
        cold_items=len(cold_item_set),
        cold_items_pct=100.0 * len(cold_item_set) / len(target_items) if target_items else 0.0,
        n_target_interactions=n_targets,
        cold_interactions=int(cold_rows.sum()),
        cold_interactions_pct=100.0 * int(cold_rows.sum()) / n_targets if n_targets else 0.0,
        cold_over_time=_share_over_time(tgt.timestamps, cold_rows, granularity),
        granularity=granularity,
        empty_targets=n_targets == 0,
    )


# ---------------------------------------------------------------------------
# distribution shift


def _per_user_positions(log: InteractionLog) -> np.ndarray:
    """Positions 1..L of each row within its user's sequence, normalized by L."""
    n = len(log)
    if n == 0:
        return np.empty(0, dtype=np.float64)
    starts = log.user_starts
    lengths = log.user_lengths()
    pos = np.arange(n) - starts[:-1][log.user_codes] + 1
    return pos / lengths[log.user_codes]


def distribution_shift(
    bundle: SplitBundle, reference: InteractionLog, eval_side: str = "test"
) -> ShiftReport:
    """Compare target time-gaps and positions against a reference log."""
    inp, tgt = bundle.eval_pair(eval_side)
    if len(tgt) == 0:
        raise EmptyTargets(f"{eval_side} target subset is empty")
    if len(reference) == 0:
        raise EmptyReference("reference log is empty")

    # per-target gap to the user's last input interaction
    last_input: dict[str, int] = {
        u: int(inp.timestamps[inp.user_slice(u).stop - 1]) for u in inp.users
    }
    gaps = []
    excluded = 0
    for uc, ts in zip(tgt.user_codes, tgt.timestamps):
        li = last_input.get(tgt.users[uc])
        if li is None:
            excluded += 1
        else:
            gaps.append(int(ts) - li)
    eval_gaps = np.asarray(gaps, dtype=np.float64)

    ref_within = np.empty(len(reference), dtype=bool)
    ref_within[0] = False
    ref_within[1:] = reference.user_codes[1:] == reference.user_codes[:-1]
    ref_gaps = (reference.timestamps[1:] - reference.timestamps[:-1])[ref_within[1:]].astype(np.float64)

    # target position within the user's full input+target sequence
    in_len = {u: inp.user_slice(u).stop - inp.user_slice(u).start for u in inp.users}
    tgt_starts = tgt.user_starts
    tgt_lengths = tgt.user_lengths()
    pos_in_tgt = np.arange(len(tgt)) - tgt_starts[:-1][tgt.user_codes] + 1
    eval_positions = np.empty(len(tgt), dtype=np.float64)
    for i, uc in enumerate(tgt.user_codes):
        u = tgt.users[uc]
        full = in_len.get(u, 0) + int(tgt_lengths[uc])
        eval_positions[i] = (in_len.get(u, 0) + int(pos_in_tgt[i])) / full
    ref_positions = _per_user_positions(reference)

    timegap_ks = None
    if eval_gaps.size and ref_gaps.size:
        timegap_ks = ks_statistic(eval_gaps, ref_gaps)
    position_ks = ks_statistic(eval_positions, ref_positions)

    return ShiftReport(
        eval_side=eval_side,
        timegap_ks=timegap_ks,
        position_ks=position_ks,
        n_eval_gaps=int(eval_gaps.size),
        n_reference_gaps=int(ref_gaps.size),
        n_eval_positions=int(eval_positions.size),
        n_reference_positions=int(ref_positions.size),
        excluded_empty_input_targets=excluded,
        eval_gaps=distribution_summary(eval_gaps, log_bins=True),
        reference_gaps=distribution_summary(ref_gaps, log_bins=True),
        eval_positions=distribution_summary(eval_positions),
        reference_positions=distribution_summary(ref_positions),
    )


# ---------------------------------------------------------------------------
# split comparison


def compare_splits(
    bundles: list[SplitBundle],
    eval_side: str = "test",
    reference: InteractionLog | None = None,
    on_provenance_mismatch: str = "error",
) -> SplitComparisonMatrix:
    """Align headline diagnostics of several bundles over one source log.

    Shift statistics use `reference` when given, else each bundle's train
    subset. Provenance differences raise by default; pass
    on_provenance_mismatch="warn" to downgrade.
    """
    if len(bundles) < 2:
        raise ValueError("compare_splits needs at least two bundles")
    provenances = {b.provenance for b in bundles}
    if len(provenances) > 1:
        msg = f"bundles come from different sources: {sorted(provenances)}"
        if on_provenance_mismatch == "warn":
            warnings.warn(msg, stacklevel=2)
        else:
            raise ProvenanceMismatch(msg)

    rows = []
    for bundle in bundles:
        desc = describe_split(bundle)
        leak = leakage(bundle, eval_side)
        cold = cold_start(bundle, eval_side)
        ref = reference if reference is not None else bundle.train
        try:
            shift = distribution_shift(bundle, ref, eval_side)
            gap_ks, pos_ks = shift.timegap_ks, shift.position_ks
        except (EmptyTargets, EmptyReference):
            gap_ks, pos_ks = None, None
        _, tgt = bundle.eval_pair(eval_side)
        rows.append(
            SplitComparisonRow(
                label=bundle.spec.label(),
                strategy=bundle.spec.strategy,
                description=desc,
                n_train=len(bundle.train),
                n_val_target=len(bundle.val_target),
                n_test_target=len(bundle.test_target),
                n_eval_users=cold.n_eval_users,
                shared_interactions=leak.shared_interactions,
                overlap_pct=leak.overlap_pct,
                leaked_target_pct=leak.leaked_target_pct,
                cold_users_pct=cold.cold_users_pct,
                cold_items_pct=cold.cold_items_pct,
                cold_interactions_pct=cold.cold_interactions_pct,
                timegap_ks=gap_ks,
                position_ks=pos_ks,
            )
        )
    return SplitComparisonMatrix(
        eval_side=eval_side,
        provenance=bundles[0].provenance,
        rows=tuple(rows),
    )
