import numpy as np
import pytest
from pytest import approx

import oracles
from conftest import make_log, random_rows
from splitaudit import (
    EmptyLog,
    InvalidRange,
    TypeMismatch,
    compare_stats,
    core_stats,
    distribution_summary,
    repeat_stats,
    temporal_stats,
    timeline,
)
from splitaudit.stats import bucket_floor, format_duration


def summary_conserves(s):
    assert sum(c for _, _, c in s.histogram) == s.count
    if s.log_histogram is not None:
        assert sum(c for _, _, c in s.log_histogram) == s.count
    qs = [x for _, x in s.quantiles]
    assert qs == sorted(qs)


class TestDistributionSummary:
    def test_empty(self):
        s = distribution_summary([])
        assert s.count == 0 and s.mean is None and s.histogram == ()

    def test_single_value(self):
        s = distribution_summary([5.0])
        assert s.histogram == ((5.0, 5.0, 1),)
        summary_conserves(s)

    def test_conservation_random(self, rng):
        for _ in range(30):
            values = rng.integers(0, 10**6, size=int(rng.integers(1, 400)))
            summary_conserves(distribution_summary(values, log_bins=True))

    def test_quantile_linear_interpolation(self):
        s = distribution_summary([0.0, 10.0])
        assert dict(s.quantiles)[0.5] == approx(5.0)

    def test_bin_cap(self, rng):
        values = np.concatenate([rng.normal(0, 1, 5000), [1e9]])
        s = distribution_summary(values)
        assert len(s.histogram) <= 100


class TestCoreStats:
    def test_single_interaction(self):
        r = core_stats(make_log([("u", "i", 1, 0)]))
        assert r.density_pct == 100.0 and r.avg_seq_len == 1.0

    def test_empty_raises(self):
        from splitaudit import InteractionLog

        with pytest.raises(EmptyLog):
            core_stats(InteractionLog.empty())

    def test_matches_oracle(self, rng):
        for _ in range(20):
            rows = random_rows(rng, max_interactions=300)
            got = core_stats(make_log(rows))
            want = oracles.core_stats(rows)
            assert got.n_users == want["n_users"]
            assert got.n_items == want["n_items"]
            assert got.n_interactions == want["n_interactions"]
            assert got.avg_seq_len == approx(want["avg_seq_len"], rel=1e-12)
            assert got.density_pct == approx(want["density_pct"], rel=1e-12)
            assert got.avg_seq_len * got.n_users == approx(got.n_interactions, rel=1e-9)


class TestTemporalStats:
    def test_collision_fixture(self):
        # timestamps {1,1,2} for one user: 2 of 3 interactions collide
        r = temporal_stats(make_log([("u", "a", 1, 0), ("u", "b", 1, 1), ("u", "c", 2, 2)]))
        assert r.collision_rate_pct == approx(100.0 * 2 / 3)

    def test_strictly_increasing_no_collisions(self, rng):
        rows = [("u", "x", 1000 * k, k) for k in range(50)]
        assert temporal_stats(make_log(rows)).collision_rate_pct == 0.0

    def test_matches_pairwise_oracle(self, rng):
        for _ in range(20):
            rows = random_rows(rng, max_interactions=250)
            got = temporal_stats(make_log(rows))
            want = oracles.temporal_stats(rows)
            assert got.start_ts == want["start_ts"]
            assert got.end_ts == want["end_ts"]
            assert got.collision_rate_pct == approx(want["collision_rate_pct"], rel=1e-12)
            assert got.delta_t.count == len(want["deltas"])
            if want["deltas"]:
                assert got.delta_t.min == min(want["deltas"])
                assert got.delta_t.max == max(want["deltas"])
                assert got.delta_t.mean == approx(
                    sum(want["deltas"]) / len(want["deltas"]), rel=1e-12
                )
            assert got.user_lifetime.count == len(want["user_lifetime"])
            assert got.item_lifetime.count == len(want["item_lifetime"])
            if want["user_lifetime"]:
                assert got.user_lifetime.max == max(want["user_lifetime"])

    def test_delta_count_identity(self, rng):
        rows = random_rows(rng, max_interactions=300)
        log = make_log(rows)
        r = temporal_stats(log)
        assert r.delta_t.count == len(log) - log.n_users

    def test_lifetimes_bounded_by_timeframe(self, rng):
        r = temporal_stats(make_log(random_rows(rng, max_interactions=300)))
        if r.user_lifetime.count:
            assert r.user_lifetime.max <= r.timeframe_ms
        if r.item_lifetime.count:
            assert r.item_lifetime.max <= r.timeframe_ms


class TestRepeatStats:
    def test_aaba_fixture(self):
        r = repeat_stats(make_log([("u", "a", 1, 0), ("u", "a", 2, 1), ("u", "b", 3, 2), ("u", "a", 4, 3)]))
        assert r.repeated_count == 2 and r.repeated_interactions_pct == approx(50.0)
        assert r.consecutive_count == 1 and r.consecutive_repeats_pct == approx(25.0)

    def test_matches_linear_scan_oracle(self, rng):
        for _ in range(20):
            rows = random_rows(rng, max_items=3, max_interactions=250)
            got = repeat_stats(make_log(rows))
            want = oracles.repeat_stats(rows)
            assert got.repeated_count == want["repeated_count"]
            assert got.consecutive_count == want["consecutive_count"]
            assert got.consecutive_count <= got.repeated_count
            assert got.per_user_repeat_share.count == len(want["per_user_repeat_share"])

    def test_repeat_identity_sum(self, rng):
        rows = random_rows(rng, max_items=5, max_interactions=300)
        log = make_log(rows)
        got = repeat_stats(log)
        per_user = 0
        for u in log.users:
            s = log.user_slice(u)
            items = [log.items[c] for c in log.item_codes[s]]
            per_user += len(items) - len(set(items))
        assert got.repeated_count == per_user


class TestTimeline:
    def test_seven_days(self):
        day = 86_400_000
        rows = [("u", "i", day * k + 5, k) for k in range(7)]
        r = timeline({"raw": make_log(rows)}, "day")
        assert len(r.buckets["raw"]) == 7
        assert all(c == 1 for _, c in r.buckets["raw"])

    def test_empty_role(self):
        from splitaudit import InteractionLog

        r = timeline(
            {"raw": make_log([("u", "i", 10, 0)]), "train": InteractionLog.empty("train")},
            "day",
        )
        assert r.buckets["train"] == ()

    def test_invalid_range(self):
        with pytest.raises(InvalidRange):
            timeline({"raw": make_log([("u", "i", 10, 0)])}, "day", (5, 1))

    @pytest.mark.parametrize("granularity", ["hour", "day", "week", "month"])
    def test_matches_datetime_oracle(self, rng, granularity):
        rows = random_rows(rng, max_interactions=300, collision_heavy=False)
        start = min(r[2] for r in rows) + 10**6
        end = max(r[2] for r in rows) - 10**6
        if start > end:
            start, end = end, start
        r = timeline({"raw": make_log(rows)}, granularity, (start, end))
        want = oracles.timeline(rows, granularity, start, end)
        assert list(r.buckets["raw"]) == want["buckets"]
        assert r.excluded["raw"] == want["excluded"]

    def test_bucket_sums_match_in_range(self, rng):
        rows = random_rows(rng, max_interactions=400)
        log = make_log(rows)
        r = timeline({"raw": log}, "hour")
        assert sum(c for _, c in r.buckets["raw"]) + r.excluded["raw"] == len(log)

    def test_negative_epoch_week_floor(self):
        # epoch day 0 is a Thursday; its ISO week starts 1969-12-29
        assert bucket_floor(np.array([0]), "week")[0] == -3 * 86_400_000


class TestCompare:
    def test_identical_reports_zero_delta(self, rng):
        log = make_log(random_rows(rng))
        t = compare_stats(core_stats(log), core_stats(log))
        assert all(row.delta_pct == 0.0 for row in t.rows if row.delta_pct is not None)
        assert any(row.field == "n_interactions" for row in t.rows)

    def test_halved_log(self):
        rows = [("u", "i", 1000 * k, k) for k in range(100)]
        full = make_log(rows)
        half = make_log(rows[:50])
        t = compare_stats(core_stats(half), core_stats(full))
        by_field = {r.field: r for r in t.rows}
        assert by_field["n_interactions"].delta_pct == approx(-50.0)

    def test_type_mismatch(self, rng):
        log = make_log(random_rows(rng))
        with pytest.raises(TypeMismatch):
            compare_stats(core_stats(log), repeat_stats(log))


class TestFormatting:
    def test_duration_units(self):
        assert format_duration(250.0) == "0.25 s"
        assert format_duration(61_200.0) == "1.02 m"
        assert format_duration(49_860_000.0) == "13.85 h"
        assert format_duration(69.65 * 86_400_000) == "69.65 d"
        assert format_duration(1.5 * 31_557_600_000) == "1.50 y"
        assert format_duration(None) == "n/a"
