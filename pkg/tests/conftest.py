import numpy as np
import pytest

from splitaudit import InteractionLog


def make_log(rows, role="raw"):
    return InteractionLog.from_rows(rows, role)


def random_rows(rng, max_users=50, max_items=20, max_interactions=500,
                min_interactions=8, collision_heavy=None):
    """Random interaction rows with forced timestamp collisions and repeats.

    Small item alphabets force repeats; timestamps drawn from a coarse grid
    force same-user collisions. Ordinals mimic a source file: 0..n-1 in
    generation order.
    """
    n_users = int(rng.integers(1, max_users + 1))
    n_items = int(rng.integers(1, max_items + 1))
    n = int(rng.integers(min_interactions, max_interactions + 1))
    if collision_heavy is None:
        collision_heavy = bool(rng.integers(0, 2))
    if collision_heavy:
        ts_values = rng.integers(0, max(2, n // 4), size=n) * 1000
    else:
        ts_values = rng.integers(0, 10**9, size=n)
    users = rng.integers(0, n_users, size=n)
    items = rng.integers(0, n_items, size=n)
    return [
        (f"u{users[k]:03d}", f"i{items[k]:03d}", int(ts_values[k]), k)
        for k in range(n)
    ]


def rows_of(log):
    return log.user_row_strings()


def bundle_rows(bundle, eval_side="test"):
    inp, tgt = bundle.eval_pair(eval_side)
    return rows_of(bundle.train), rows_of(inp), rows_of(tgt)


@pytest.fixture
def rng():
    return np.random.default_rng(20260810)
