"""Canonical interaction-log data model.

An interaction is a (user, item, timestamp) event plus an ordinal: the event's
zero-based position in its source file. The ordinal breaks ties among equal
timestamps deterministically, so every log has a total canonical order
(user_id, timestamp, ordinal).

InteractionLog stores the log columnar: string ids are interned into sorted
vocabularies and rows carry dense integer codes, which keeps per-user scans
and whole-log statistics vectorizable. Handles never leak into outputs.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

import numpy as np

SUBSET_ROLES = (
    "raw",
    "preprocessed",
    "train",
    "val_input",
    "val_target",
    "test_input",
    "test_target",
)


@dataclass(frozen=True)
class Interaction:
    """One (user, item, timestamp) event; timestamp is epoch milliseconds UTC."""

    user_id: str
    item_id: str
    timestamp: int
    ordinal: int

    def sort_key(self) -> tuple[str, int, int]:
        return (self.user_id, self.timestamp, self.ordinal)


@dataclass(frozen=True)
class Violation:
    """One invariant violation found by validate_log."""

    invariant: str
    ordinal: int
    message: str


@dataclass(frozen=True)
class ValidationReport:
    """validate_log findings in serializable form."""

    violations: tuple[Violation, ...]


class InteractionLog:
    """Immutable columnar interaction log.

    Rows are normally held in canonical order; construct via `from_rows` /
    `from_interactions` to have the order enforced. The raw constructor keeps
    rows as given so that `validate_log` can inspect non-canonical data.
    """

    __slots__ = (
        "users",
        "items",
        "user_codes",
        "item_codes",
        "timestamps",
        "ordinals",
        "user_starts",
        "role",
        "_user_pos",
    )

    def __init__(
        self,
        users: Sequence[str],
        items: Sequence[str],
        user_codes: np.ndarray,
        item_codes: np.ndarray,
        timestamps: np.ndarray,
        ordinals: np.ndarray,
        role: str = "raw",
    ):
        self.users = tuple(users)
        self.items = tuple(items)
        self.user_codes = np.ascontiguousarray(user_codes, dtype=np.int64)
        self.item_codes = np.ascontiguousarray(item_codes, dtype=np.int64)
        self.timestamps = np.ascontiguousarray(timestamps, dtype=np.int64)
        self.ordinals = np.ascontiguousarray(ordinals, dtype=np.int64)
        self.role = role
        for arr in (self.user_codes, self.item_codes, self.timestamps, self.ordinals):
            if len(arr) != len(self.user_codes):
                raise ValueError("column arrays must have equal length")
            arr.flags.writeable = False  # share-safe across threads
        self.user_starts = _run_starts(self.user_codes, len(self.users))
        self._user_pos = {u: i for i, u in enumerate(self.users)}

    # -- constructors ----------------------------------------------------

    @classmethod
    def from_rows(
        cls,
        rows: Iterable[tuple[str, str, int, int]],
        role: str = "raw",
    ) -> "InteractionLog":
        """Build a canonically ordered log from (user, item, ts_ms, ordinal) rows."""
        rows = list(rows)
        if not rows:
            return cls.empty(role)
        user_arr = np.array([r[0] for r in rows], dtype=object)
        item_arr = np.array([r[1] for r in rows], dtype=object)
        ts = np.fromiter((r[2] for r in rows), dtype=np.int64, count=len(rows))
        ordinal = np.fromiter((r[3] for r in rows), dtype=np.int64, count=len(rows))
        users, user_codes = np.unique(user_arr, return_inverse=True)
        items, item_codes = np.unique(item_arr, return_inverse=True)
        order = np.lexsort((ordinal, ts, user_codes))
        return cls(
            users.tolist(),
            items.tolist(),
            user_codes[order],
            item_codes[order],
            ts[order],
            ordinal[order],
            role,
        )

    @classmethod
    def from_interactions(
        cls, interactions: Iterable[Interaction], role: str = "raw"
    ) -> "InteractionLog":
        return cls.from_rows(
            ((it.user_id, it.item_id, it.timestamp, it.ordinal) for it in interactions),
            role,
        )

    @classmethod
    def empty(cls, role: str = "raw") -> "InteractionLog":
        z = np.empty(0, dtype=np.int64)
        return cls((), (), z, z, z, z, role)

    # -- basic access -----------------------------------------------------

    def __len__(self) -> int:
        return len(self.user_codes)

    @property
    def n_interactions(self) -> int:
        return len(self.user_codes)

    @property
    def n_users(self) -> int:
        return len(self.users)

    @property
    def n_items(self) -> int:
        return len(self.items)

    def interaction(self, i: int) -> Interaction:
        return Interaction(
            self.users[self.user_codes[i]],
            self.items[self.item_codes[i]],
            int(self.timestamps[i]),
            int(self.ordinals[i]),
        )

    def __iter__(self) -> Iterator[Interaction]:
        users, items = self.users, self.items
        for uc, ic, ts, o in zip(
            self.user_codes, self.item_codes, self.timestamps, self.ordinals
        ):
            yield Interaction(users[uc], items[ic], int(ts), int(o))

    def user_slice(self, user_id: str) -> slice:
        """Contiguous row range of one user's interactions."""
        i = self._user_pos[user_id]
        return slice(int(self.user_starts[i]), int(self.user_starts[i + 1]))

    def user_row_strings(self) -> list[tuple[str, str, int, int]]:
        """Rows decoded to (user, item, ts, ordinal) tuples, in stored order."""
        return [
            (self.users[uc], self.items[ic], int(ts), int(o))
            for uc, ic, ts, o in zip(
                self.user_codes, self.item_codes, self.timestamps, self.ordinals
            )
        ]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, InteractionLog):
            return NotImplemented
        if self.role != other.role or len(self) != len(other):
            return False
        if not (
            np.array_equal(self.timestamps, other.timestamps)
            and np.array_equal(self.ordinals, other.ordinals)
        ):
            return False
        # vocabularies may differ in content even for equal row counts
        return (
            [self.users[c] for c in self.user_codes]
            == [other.users[c] for c in other.user_codes]
            and [self.items[c] for c in self.item_codes]
            == [other.items[c] for c in other.item_codes]
        )

    def __repr__(self) -> str:
        return (
            f"InteractionLog(role={self.role!r}, interactions={len(self)}, "
            f"users={self.n_users}, items={self.n_items})"
        )

    # -- derivation -------------------------------------------------------

    def with_role(self, role: str) -> "InteractionLog":
        if role == self.role:
            return self
        return InteractionLog(
            self.users,
            self.items,
            self.user_codes,
            self.item_codes,
            self.timestamps,
            self.ordinals,
            role,
        )

    def select(self, row_indices: np.ndarray, role: str | None = None) -> "InteractionLog":
        """Sub-log of the given rows (ascending indices keep canonical order).

        Vocabularies are recomputed so users/items reflect only surviving rows.
        """
        idx = np.asarray(row_indices)
        if idx.dtype == bool:
            idx = np.flatnonzero(idx)
        role = self.role if role is None else role
        if len(idx) == len(self) and role == self.role:
            return self
        uc = self.user_codes[idx]
        ic = self.item_codes[idx]
        kept_users, new_uc = np.unique(uc, return_inverse=True)
        kept_items, new_ic = np.unique(ic, return_inverse=True)
        return InteractionLog(
            [self.users[i] for i in kept_users],
            [self.items[i] for i in kept_items],
            new_uc,
            new_ic,
            self.timestamps[idx],
            self.ordinals[idx],
            role,
        )

    # -- serialization ----------------------------------------------------

    def write_csv(self, path, include_ordinal: bool = False) -> None:
        """Write the canonical CSV form: source (ordinal) order, ms timestamps.

        Re-parsing with timestamp_format=epoch_millis reproduces the log; for
        logs whose ordinals are contiguous 0..N-1 (any freshly parsed log) the
        round trip is exact, otherwise ordinals are renumbered rank-preserving.
        With include_ordinal a source_ordinal column preserves row identity
        exactly (bundle subsets rely on this).
        """
        order = np.argsort(self.ordinals, kind="stable")
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh)
            header = ["user_id", "item_id", "timestamp"]
            if include_ordinal:
                header.append("source_ordinal")
            w.writerow(header)
            for i in order:
                row = [
                    self.users[self.user_codes[i]],
                    self.items[self.item_codes[i]],
                    int(self.timestamps[i]),
                ]
                if include_ordinal:
                    row.append(int(self.ordinals[i]))
                w.writerow(row)

    def user_lengths(self) -> np.ndarray:
        return np.diff(self.user_starts)


def _run_starts(user_codes: np.ndarray, n_users: int) -> np.ndarray:
    """CSR-style offsets of each user's contiguous row block.

    Assumes rows grouped by user code ascending (true for canonical logs);
    for non-canonical logs the offsets are still well-defined via bincount,
    and validate_log reports the inconsistency.
    """
    counts = np.bincount(user_codes, minlength=n_users) if len(user_codes) else np.zeros(n_users, dtype=np.int64)
    starts = np.zeros(n_users + 1, dtype=np.int64)
    np.cumsum(counts, out=starts[1:])
    return starts


def validate_log(log: InteractionLog) -> list[Violation]:
    """Scan a log for invariant violations; empty list iff the log is canonical.

    Violations are findings, not faults: each names the broken invariant and
    the offending interaction's ordinal, in a deterministic scan order.
    """
    out: list[Violation] = []
    n = len(log)
    if n == 0:
        return out

    neg = np.flatnonzero(log.timestamps < 0)
    for i in neg:
        out.append(
            Violation(
                "timestamp_non_negative",
                int(log.ordinals[i]),
                f"timestamp {int(log.timestamps[i])} is negative",
            )
        )

    seen: set[int] = set()
    for o in log.ordinals:
        o = int(o)
        if o in seen:
            out.append(Violation("ordinal_unique", o, f"ordinal {o} occurs more than once"))
        else:
            seen.add(o)

    rows = log.user_row_strings()
    for i in range(1, n):
        prev = (rows[i - 1][0], rows[i - 1][2], rows[i - 1][3])
        cur = (rows[i][0], rows[i][2], rows[i][3])
        if cur <= prev:
            out.append(
                Violation(
                    "canonical_order",
                    rows[i][3],
                    f"row {i} sorts at or before its predecessor",
                )
            )

    # each user must own exactly one contiguous block of rows
    seen_users: set[str] = set()
    i = 0
    while i < n:
        j = i
        while j < n and rows[j][0] == rows[i][0]:
            j += 1
        if rows[i][0] in seen_users:
            out.append(
                Violation(
                    "user_index_single_slice",
                    rows[i][3],
                    f"user {rows[i][0]!r} has rows outside its index slice",
                )
            )
        seen_users.add(rows[i][0])
        i = j

    return out
