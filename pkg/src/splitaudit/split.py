"""Evaluation split construction: global temporal and leave-one-out.

Both strategies materialize a SplitBundle of five role-tagged subsets:
train, val_input, val_target, test_input, test_target. Evaluation inputs for
test include all within-user history before the evaluation period; validation
inputs are drawn from the training period only, so validation simulates the
same horizon the model will face.

Global temporal cuts are index cuts on the (timestamp, ordinal)-sorted
sequence (nearest rank via ceil): interactions sharing a boundary timestamp
are split deterministically by their source order.
"""
from __future__ import annotations

import csv
import json
import math
import os
from dataclasses import dataclass, replace

import numpy as np

from .errors import DegenerateSplit, EmptyEvaluation, EmptyLog
from .log import InteractionLog

STRATEGIES = ("leave_one_out", "global_temporal")
TARGET_MODES = ("last_item", "all_items")
BUNDLE_ROLES = ("train", "val_input", "val_target", "test_input", "test_target")


@dataclass(frozen=True)
class SplitSpec:
    """Declarative split description.

    Cold items in validation and test targets are filtered by default;
    filter_cold_inputs extends the filtering to evaluation inputs, the
    stricter variant. leave_one_out implies last_item targets.
    """

    strategy: str = "global_temporal"
    q_val: float | None = 0.8
    q_test: float | None = 0.9
    target_mode: str = "last_item"
    filter_cold_items: bool = True
    filter_cold_inputs: bool = False
    min_user_length_loo: int = 3

    def __post_init__(self):
        if self.strategy not in STRATEGIES:
            raise ValueError(f"strategy must be one of {STRATEGIES}, got {self.strategy!r}")
        if self.target_mode not in TARGET_MODES:
            raise ValueError(f"target_mode must be one of {TARGET_MODES}")
        if self.strategy == "global_temporal":
            if self.q_val is None or self.q_test is None:
                raise ValueError("global_temporal requires q_val and q_test")
            if not (0.0 < self.q_val < self.q_test < 1.0):
                raise ValueError(
                    f"need 0 < q_val < q_test < 1, got q_val={self.q_val}, q_test={self.q_test}"
                )
        if self.strategy == "leave_one_out" and self.min_user_length_loo < 3:
            raise ValueError("min_user_length_loo must be >= 3")

    def label(self) -> str:
        if self.strategy == "leave_one_out":
            return "loo"
        mode = "last" if self.target_mode == "last_item" else "all"
        return f"gts_q{self.q_test:g}_{mode}"

    def to_dict(self) -> dict:
        return {
            "strategy": self.strategy,
            "q_val": self.q_val,
            "q_test": self.q_test,
            "target_mode": self.target_mode,
            "filter_cold_items": self.filter_cold_items,
            "filter_cold_inputs": self.filter_cold_inputs,
            "min_user_length_loo": self.min_user_length_loo,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SplitSpec":
        return cls(**{k: d[k] for k in cls.__dataclass_fields__ if k in d})


@dataclass(frozen=True)
class SplitBundle:
    """Five role-tagged subsets plus the spec and provenance that made them.

    row_identity says whether ordinals across subsets name rows of one source
    log ("ordinal": in-process splits, or saved bundles that kept the
    source_ordinal column) or are per-file ranks ("attributes": external CSV
    bundles). Diagnostics that match rows across subsets key off this.
    """

    train: InteractionLog
    val_input: InteractionLog
    val_target: InteractionLog
    test_input: InteractionLog
    test_target: InteractionLog
    spec: SplitSpec
    provenance: str = ""
    row_identity: str = "ordinal"

    def subset(self, role: str) -> InteractionLog:
        if role not in BUNDLE_ROLES:
            raise KeyError(role)
        return getattr(self, role)

    def eval_pair(self, eval_side: str) -> tuple[InteractionLog, InteractionLog]:
        if eval_side == "test":
            return self.test_input, self.test_target
        if eval_side == "validation":
            return self.val_input, self.val_target
        raise ValueError(f"eval side must be 'validation' or 'test', got {eval_side!r}")


@dataclass(frozen=True)
class RoleSummary:
    n_users: int
    n_items: int
    n_interactions: int
    start_ts: int | None
    end_ts: int | None


@dataclass(frozen=True)
class SplitDescription:
    strategy: str
    provenance: str
    roles: dict[str, RoleSummary]
    empty_input_users_val: int
    empty_input_users_test: int


# ---------------------------------------------------------------------------


def _last_row_per_user(rows: np.ndarray, user_codes: np.ndarray) -> np.ndarray:
    """Given ascending row indices grouped by user, keep each user's last row."""
    if len(rows) == 0:
        return rows
    u = user_codes[rows]
    is_last = np.r_[u[1:] != u[:-1], True]
    return rows[is_last]


def _cold_filter(
    log: InteractionLog,
    train_rows: np.ndarray,
    input_rows: np.ndarray,
    target_rows: np.ndarray,
    filter_inputs: bool,
) -> tuple[np.ndarray, np.ndarray]:
    """Drop target rows with items absent from train; users left without
    targets lose their input rows too."""
    train_items = np.zeros(log.n_items, dtype=bool)
    train_items[log.item_codes[train_rows]] = True
    warm = train_items[log.item_codes[target_rows]]
    target_rows = target_rows[warm]
    surviving = np.zeros(log.n_users, dtype=bool)
    surviving[log.user_codes[target_rows]] = True
    input_rows = input_rows[surviving[log.user_codes[input_rows]]]
    if filter_inputs:
        input_rows = input_rows[train_items[log.item_codes[input_rows]]]
    return input_rows, target_rows


def global_temporal_split(log: InteractionLog, spec: SplitSpec) -> SplitBundle:
    """Split at interaction-count quantiles of the global (ts, ordinal) order."""
    if spec.strategy != "global_temporal":
        raise ValueError("spec.strategy must be 'global_temporal'")
    n = len(log)
    if n == 0:
        raise EmptyLog("cannot split an empty log")
    order = np.lexsort((log.ordinals, log.timestamps))
    k_val = math.ceil(spec.q_val * n)
    k_test = math.ceil(spec.q_test * n)
    if k_val == 0 or k_val >= k_test or k_test >= n:
        raise DegenerateSplit(
            f"period sizes {k_val}/{k_test - k_val}/{n - k_test} from "
            f"q=({spec.q_val}, {spec.q_test}) on {n} interactions"
        )
    period = np.empty(n, dtype=np.int8)
    period[order[:k_val]] = 0
    period[order[k_val:k_test]] = 1
    period[order[k_test:]] = 2

    train_rows = np.flatnonzero(period == 0)

    def eval_side(period_id: int) -> tuple[np.ndarray, np.ndarray]:
        t_rows = np.flatnonzero(period == period_id)
        users = np.zeros(log.n_users, dtype=bool)
        users[log.user_codes[t_rows]] = True
        if period_id == 2:
            in_mask = (period <= 1) & users[log.user_codes]
        else:
            in_mask = (period == 0) & users[log.user_codes]
        in_rows = np.flatnonzero(in_mask)
        if spec.target_mode == "last_item":
            t_rows = _last_row_per_user(t_rows, log.user_codes)
        return in_rows, t_rows

    test_in, test_tg = eval_side(2)
    val_in, val_tg = eval_side(1)
    if spec.filter_cold_items:
        test_in, test_tg = _cold_filter(log, train_rows, test_in, test_tg, spec.filter_cold_inputs)
        val_in, val_tg = _cold_filter(log, train_rows, val_in, val_tg, spec.filter_cold_inputs)

    return SplitBundle(
        train=log.select(train_rows, "train"),
        val_input=log.select(val_in, "val_input"),
        val_target=log.select(val_tg, "val_target"),
        test_input=log.select(test_in, "test_input"),
        test_target=log.select(test_tg, "test_target"),
        spec=spec,
        provenance="",
    )


def leave_one_out_split(log: InteractionLog, spec: SplitSpec) -> SplitBundle:
    """Hold out each eligible user's last interaction for test and the
    second-to-last for validation; shorter users go entirely to train."""
    if spec.strategy != "leave_one_out":
        raise ValueError("spec.strategy must be 'leave_one_out'")
    n = len(log)
    if n == 0:
        raise EmptyLog("cannot split an empty log")
    starts = log.user_starts
    lengths = log.user_lengths()
    eligible = lengths >= spec.min_user_length_loo
    if not eligible.any():
        raise EmptyEvaluation(
            f"no user has >= {spec.min_user_length_loo} interactions"
        )

    last = starts[1:] - 1
    second_last = starts[1:] - 2
    test_tg = last[eligible]
    val_tg = second_last[eligible]

    row_user = log.user_codes
    pos_in_user = np.arange(n) - starts[:-1][row_user]
    user_len = lengths[row_user]
    user_ok = eligible[row_user]
    train_mask = np.where(user_ok, pos_in_user < user_len - 2, True)
    test_in_mask = user_ok & (pos_in_user < user_len - 1)
    val_in_mask = user_ok & (pos_in_user < user_len - 2)

    train_rows = np.flatnonzero(train_mask)
    test_in = np.flatnonzero(test_in_mask)
    val_in = np.flatnonzero(val_in_mask)

    if spec.filter_cold_items:
        test_in, test_tg = _cold_filter(log, train_rows, test_in, test_tg, spec.filter_cold_inputs)
        val_in, val_tg = _cold_filter(log, train_rows, val_in, val_tg, spec.filter_cold_inputs)

    return SplitBundle(
        train=log.select(train_rows, "train"),
        val_input=log.select(val_in, "val_input"),
        val_target=log.select(np.sort(val_tg), "val_target"),
        test_input=log.select(test_in, "test_input"),
        test_target=log.select(np.sort(test_tg), "test_target"),
        spec=spec,
        provenance="",
    )


def make_split(log: InteractionLog, spec: SplitSpec, provenance: str = "") -> SplitBundle:
    if spec.strategy == "global_temporal":
        bundle = global_temporal_split(log, spec)
    else:
        bundle = leave_one_out_split(log, spec)
    return replace(bundle, provenance=provenance)


def describe_split(bundle: SplitBundle) -> SplitDescription:
    roles = {}
    for role in BUNDLE_ROLES:
        sub = bundle.subset(role)
        if len(sub):
            roles[role] = RoleSummary(
                sub.n_users,
                sub.n_items,
                len(sub),
                int(sub.timestamps.min()),
                int(sub.timestamps.max()),
            )
        else:
            roles[role] = RoleSummary(0, 0, 0, None, None)

    def empty_inputs(inp: InteractionLog, tgt: InteractionLog) -> int:
        with_input = set(inp.users)
        return sum(1 for u in tgt.users if u not in with_input)

    return SplitDescription(
        strategy=bundle.spec.strategy,
        provenance=bundle.provenance,
        roles=roles,
        empty_input_users_val=empty_inputs(bundle.val_input, bundle.val_target),
        empty_input_users_test=empty_inputs(bundle.test_input, bundle.test_target),
    )


# ---------------------------------------------------------------------------
# bundle directory layout: five CSVs + split.json + provenance.json


def save_bundle(bundle: SplitBundle, out_dir, prefix: str = "split") -> list[str]:
    os.makedirs(out_dir, exist_ok=True)
    written = []
    keep_ordinals = bundle.row_identity == "ordinal"
    for role in BUNDLE_ROLES:
        path = os.path.join(out_dir, f"{prefix}_{role}.csv")
        bundle.subset(role).write_csv(path, include_ordinal=keep_ordinals)
        written.append(path)
    spec_path = os.path.join(out_dir, f"{prefix}.json")
    with open(spec_path, "w", encoding="utf-8") as fh:
        json.dump(bundle.spec.to_dict(), fh, indent=2)
        fh.write("\n")
    written.append(spec_path)
    prov_path = os.path.join(out_dir, "provenance.json")
    with open(prov_path, "w", encoding="utf-8") as fh:
        json.dump({"provenance": bundle.provenance}, fh, indent=2)
        fh.write("\n")
    written.append(prov_path)
    return written


def _load_subset(path, role: str) -> tuple[InteractionLog, bool]:
    """Read one bundle CSV; returns (log, had_source_ordinal_column)."""
    with open(path, "r", newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            return InteractionLog.empty(role), True
        cols = {name.strip(): idx for idx, name in enumerate(header)}
        for required in ("user_id", "item_id", "timestamp"):
            if required not in cols:
                raise EmptyLog(f"{path}: missing column {required!r}")
        o_ix = cols.get("source_ordinal")
        rows = []
        for k, rec in enumerate(reader):
            if not rec:
                continue
            ordinal = int(rec[o_ix]) if o_ix is not None else k
            rows.append(
                (rec[cols["user_id"]], rec[cols["item_id"]], int(rec[cols["timestamp"]]), ordinal)
            )
    if not rows:
        return InteractionLog.empty(role), True
    return InteractionLog.from_rows(rows, role), o_ix is not None


def load_bundle(bundle_dir, prefix: str = "split") -> SplitBundle:
    """Load a bundle directory produced by save_bundle (or a look-alike from
    an external pipeline using the same filenames).

    Bundles written by this toolkit carry a source_ordinal column, so row
    identity across subsets is preserved; external CSVs without it get
    per-file rank ordinals and row_identity="attributes".
    """
    subsets = {}
    identity = True
    for role in BUNDLE_ROLES:
        path = os.path.join(bundle_dir, f"{prefix}_{role}.csv")
        try:
            subsets[role], had_ordinals = _load_subset(path, role)
            identity = identity and had_ordinals
        except FileNotFoundError:
            if role in ("train", "test_target"):
                raise
            subsets[role] = InteractionLog.empty(role)
    spec_path = os.path.join(bundle_dir, f"{prefix}.json")
    if os.path.exists(spec_path):
        with open(spec_path, "r", encoding="utf-8") as fh:
            spec = SplitSpec.from_dict(json.load(fh))
    else:
        spec = SplitSpec(strategy="global_temporal", q_val=0.8, q_test=0.9)
    prov_path = os.path.join(bundle_dir, "provenance.json")
    provenance = ""
    if os.path.exists(prov_path):
        with open(prov_path, "r", encoding="utf-8") as fh:
            provenance = json.load(fh).get("provenance", "")
    return SplitBundle(
        spec=spec,
        provenance=provenance,
        row_identity="ordinal" if identity else "attributes",
        **subsets,
    )
