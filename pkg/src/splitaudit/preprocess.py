"""Dataset transformations applied before splitting.

Three steps, applied in the fixed order dedup -> n-core -> collision shuffle
when combined through a PreprocessSpec: deduplication changes the counts the
core filter sees, and shuffling last cannot resurrect consecutive duplicates
into the filtered data.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .log import InteractionLog


@dataclass(frozen=True)
class PreprocessSpec:
    """Declarative preprocessing description.

    n_core counts interactions (a user with 5 interactions on one item
    survives 5-core); this reading is surfaced in report output.
    """

    n_core: int | None = None
    drop_consecutive_repeats: bool = False
    shuffle_collisions_seed: int | None = None

    def __post_init__(self):
        if self.n_core is not None and self.n_core < 1:
            raise ValueError(f"n_core must be >= 1, got {self.n_core}")
        if self.shuffle_collisions_seed is not None and self.shuffle_collisions_seed < 0:
            raise ValueError("shuffle_collisions_seed must be unsigned")

    def is_noop(self) -> bool:
        return (
            (self.n_core is None or self.n_core == 1)
            and not self.drop_consecutive_repeats
            and self.shuffle_collisions_seed is None
        )

    def describe(self) -> str:
        parts = []
        if self.drop_consecutive_repeats:
            parts.append("drop-consecutive-repeats")
        if self.n_core is not None and self.n_core > 1:
            parts.append(f"{self.n_core}-core")
        if self.shuffle_collisions_seed is not None:
            parts.append(f"shuffle-collisions(seed={self.shuffle_collisions_seed})")
        return "+".join(parts) if parts else "none"


def apply_preprocessing(log: InteractionLog, spec: PreprocessSpec) -> InteractionLog:
    out = log
    if spec.drop_consecutive_repeats:
        out = drop_consecutive_repeats(out)
    if spec.n_core is not None and spec.n_core > 1:
        out = n_core_filter(out, spec.n_core)
    if spec.shuffle_collisions_seed is not None:
        out = shuffle_collision_order(out, spec.shuffle_collisions_seed)
    if not spec.is_noop():
        out = out.with_role("preprocessed")
    return out


def n_core_filter(log: InteractionLog, n: int) -> InteractionLog:
    """Iteratively drop users and items with < n interactions until stable.

    The fixed point is unique regardless of pruning order, so each pass
    removes both under-count users and under-count items at once. May return
    an empty log.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if n == 1 or len(log) == 0:
        return log
    keep = np.arange(len(log))
    uc = log.user_codes
    ic = log.item_codes
    while len(keep):
        user_counts = np.bincount(uc[keep], minlength=log.n_users)
        item_counts = np.bincount(ic[keep], minlength=log.n_items)
        ok = (user_counts[uc[keep]] >= n) & (item_counts[ic[keep]] >= n)
        if ok.all():
            break
        keep = keep[ok]
    if len(keep) == len(log):
        return log
    return log.select(keep)


def drop_consecutive_repeats(log: InteractionLog) -> InteractionLog:
    """Keep only the first interaction of each within-user run of one item."""
    n = len(log)
    if n == 0:
        return log
    same_user = np.empty(n, dtype=bool)
    same_user[0] = False
    same_user[1:] = log.user_codes[1:] == log.user_codes[:-1]
    same_item = np.empty(n, dtype=bool)
    same_item[0] = False
    same_item[1:] = log.item_codes[1:] == log.item_codes[:-1]
    keep = ~(same_user & same_item)
    if keep.all():
        return log
    return log.select(keep)


def shuffle_collision_order(log: InteractionLog, seed: int) -> InteractionLog:
    """Permute each within-user group of timestamp-colliding events.

    Each maximal same-(user, timestamp) group is permuted uniformly at random
    by reassigning the group's own ordinals across its rows, i.e. the items
    swap ordinals while the (user, timestamp) multiset stays fixed. Seeded
    with PCG64, so a fixed seed reproduces exactly; rows with unique
    timestamps are untouched and draw nothing from the generator.
    """
    n = len(log)
    if n == 0:
        return log
    boundary = np.empty(n, dtype=bool)
    boundary[0] = True
    boundary[1:] = (log.user_codes[1:] != log.user_codes[:-1]) | (
        log.timestamps[1:] != log.timestamps[:-1]
    )
    starts = np.flatnonzero(boundary)
    ends = np.append(starts[1:], n)
    sizes = ends - starts
    if not (sizes >= 2).any():
        return log

    rng = np.random.Generator(np.random.PCG64(seed))
    new_items = log.item_codes.copy()
    for s, e in zip(starts[sizes >= 2], ends[sizes >= 2]):
        perm = rng.permutation(e - s)
        new_items[s:e] = log.item_codes[s:e][perm]
    return InteractionLog(
        log.users,
        log.items,
        log.user_codes,
        new_items,
        log.timestamps,
        log.ordinals,
        log.role,
    )
