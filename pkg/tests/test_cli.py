import hashlib
import json
import os
from pathlib import Path

import pytest

import oracles
from splitaudit import from_json
from splitaudit.cli import main

FIXTURE = Path(__file__).parent / "data" / "fixture_20.csv"
GOLDEN = Path(__file__).parent / "data" / "golden"

MAPPING_FLAGS = ["--time-format", "epoch_seconds"]


def fixture_rows():
    rows = []
    with open(FIXTURE) as fh:
        next(fh)
        for k, line in enumerate(fh):
            u, i, t = line.strip().split(",")
            rows.append((u, i, int(t) * 1000, k))
    return rows


def run(argv):
    return main(argv)


def tree_bytes(root):
    out = {}
    for p in sorted(Path(root).rglob("*")):
        if p.is_file():
            out[str(p.relative_to(root))] = p.read_bytes()
    return out


class TestStats:
    def test_writes_reports(self, tmp_path):
        out = tmp_path / "out"
        rc = run(["stats", "--input", str(FIXTURE), *MAPPING_FLAGS, "--out-dir", str(out)])
        assert rc == 0
        core = from_json((out / "core_raw.json").read_bytes())
        want = oracles.core_stats(fixture_rows())
        assert core.n_users == want["n_users"]
        assert core.n_interactions == 20
        temporal = from_json((out / "temporal_raw.json").read_bytes())
        assert temporal.collision_rate_pct == pytest.approx(
            oracles.temporal_stats(fixture_rows())["collision_rate_pct"]
        )
        assert (out / "stats.md").exists()

    def test_missing_column_exit_1(self, tmp_path, capsys):
        rc = run(
            ["stats", "--input", str(FIXTURE), "--user-col", "nope",
             *MAPPING_FLAGS, "--out-dir", str(tmp_path / "x")]
        )
        assert rc == 1
        assert "nope" in capsys.readouterr().err

    def test_usage_error_nonzero(self, capsys):
        assert run(["stats"]) == 1  # --input required
        assert "error" in capsys.readouterr().err

    def test_preprocessing_comparison(self, tmp_path):
        out = tmp_path / "out"
        rc = run(
            ["stats", "--input", str(FIXTURE), *MAPPING_FLAGS,
             "--drop-consecutive", "--out-dir", str(out)]
        )
        assert rc == 0
        assert (out / "core_preprocessed.json").exists()
        cmp_core = from_json((out / "compare_core.json").read_bytes())
        by_field = {r.field: r for r in cmp_core.rows}
        # two consecutive repeats removed: 20 -> 18
        assert by_field["n_interactions"].analysed == 18.0
        assert by_field["n_interactions"].reference == 20.0


class TestSplitCmd:
    def test_bundle_directory_layout(self, tmp_path):
        out = tmp_path / "bundle"
        rc = run(
            ["split", "--input", str(FIXTURE), *MAPPING_FLAGS,
             "--split", "loo", "--out-dir", str(out)]
        )
        assert rc == 0
        names = sorted(p.name for p in out.iterdir())
        assert names == [
            "description.json",
            "description.md",
            "provenance.json",
            "split.json",
            "split_test_input.csv",
            "split_test_target.csv",
            "split_train.csv",
            "split_val_input.csv",
            "split_val_target.csv",
        ]
        spec = json.loads((out / "split.json").read_text())
        assert spec["strategy"] == "leave_one_out"

    def test_input_not_mutated(self, tmp_path):
        before = hashlib.sha256(FIXTURE.read_bytes()).hexdigest()
        run(["split", "--input", str(FIXTURE), *MAPPING_FLAGS, "--out-dir", str(tmp_path / "b")])
        assert hashlib.sha256(FIXTURE.read_bytes()).hexdigest() == before


class TestAudit:
    def audit_args(self, out, extra=()):
        return [
            "audit", "--input", str(FIXTURE), *MAPPING_FLAGS,
            "--split", "loo", "--out-dir", str(out), *extra,
        ]

    def test_byte_identical_across_invocations(self, tmp_path):
        a, b = tmp_path / "a", tmp_path / "b"
        assert run(self.audit_args(a)) == 0
        assert run(self.audit_args(b)) == 0
        ta, tb = tree_bytes(a), tree_bytes(b)
        assert ta.keys() == tb.keys()
        assert ta == tb

    def test_values_match_oracles(self, tmp_path):
        out = tmp_path / "out"
        # keep cold items so the oracle-side bundle is the plain LOO structure
        assert run(self.audit_args(out, ["--keep-cold"])) == 0
        rows = fixture_rows()
        seqs = oracles.user_sequences(rows)
        train, test_in, test_tg = [], [], []
        for seq in seqs.values():
            if len(seq) >= 3:
                train += seq[:-2]
                test_in += seq[:-1]
                test_tg.append(seq[-1])
            else:
                train += seq
        leak = from_json((out / "leakage_test.json").read_bytes())
        want = oracles.leakage(oracles.canonical(train), oracles.canonical(test_in), oracles.canonical(test_tg))
        assert leak.leaked_target_pct == pytest.approx(want["leaked_target_pct"])
        assert leak.shared_interactions == want["shared_interactions"]
        cold = from_json((out / "coldstart_test.json").read_bytes())
        assert cold.cold_users == 0

        summary = from_json((out / "summary.json").read_bytes())
        by_metric = {c.metric: c for c in summary.cards}
        t_want = oracles.temporal_stats(rows)
        assert by_metric["collision_rate_pct"].value == pytest.approx(t_want["collision_rate_pct"])
        assert by_metric["leaked_target_pct"].value == pytest.approx(want["leaked_target_pct"])

    def test_matches_golden(self, tmp_path):
        out = tmp_path / "out"
        assert run(self.audit_args(out)) == 0
        for name in ("summary.json", "audit.md", "leakage_test.json", "description.json"):
            golden = GOLDEN / name
            assert golden.exists(), f"golden file {name} missing; regenerate via demos/make_goldens.py"
            assert (out / name).read_bytes() == golden.read_bytes(), f"{name} drifted from golden"

    def test_fail_on_alert_exit_2(self, tmp_path):
        # LOO on this fixture leaks heavily; default thresholds alert on it
        out = tmp_path / "out"
        rc = run(self.audit_args(out, ["--fail-on-alert", "--keep-cold"]))
        assert rc == 2
        summary = from_json((out / "summary.json").read_bytes())
        assert summary.worst_status() == "alert"

    def test_bundle_dir_mode(self, tmp_path):
        bdir = tmp_path / "bundle"
        run(["split", "--input", str(FIXTURE), *MAPPING_FLAGS, "--split", "loo",
             "--keep-cold", "--out-dir", str(bdir)])
        out = tmp_path / "audit"
        rc = run(["audit", "--bundle-dir", str(bdir), "--out-dir", str(out)])
        assert rc == 0
        leak = from_json((out / "leakage_test.json").read_bytes())
        direct = tmp_path / "direct"
        run(self.audit_args(direct, ["--keep-cold"]))
        leak_direct = from_json((direct / "leakage_test.json").read_bytes())
        assert leak.leaked_target_pct == leak_direct.leaked_target_pct

    def test_generated_at_flag(self, tmp_path):
        out = tmp_path / "out"
        run(self.audit_args(out, ["--generated-at", "1234"]))
        summary = from_json((out / "summary.json").read_bytes())
        assert summary.generated_at == 1234


class TestThresholdWiring:
    def test_custom_thresholds_file(self, tmp_path):
        from splitaudit import ThresholdConfig, to_json

        lax = ThresholdConfig(
            leaked_target_pct=(99.0, 99.9),
            timegap_ks=(0.99, 0.999),
            position_ks=(0.99, 0.999),
            collision_rate_pct=(99.0, 99.9),
            consecutive_repeats_pct=(99.0, 99.9),
            cold_items_pct=(99.0, 99.9),
            cold_users_pct=(99.0, 99.9),
            min_eval_users=(0.0, 0.0),
            min_eval_interactions=(0.0, 0.0),
        )
        cfg = tmp_path / "lax.json"
        cfg.write_bytes(to_json(lax))
        out = tmp_path / "out"
        rc = run(["audit", "--input", str(FIXTURE), *MAPPING_FLAGS, "--split", "loo",
                  "--keep-cold", "--thresholds", str(cfg), "--fail-on-alert",
                  "--out-dir", str(out)])
        assert rc == 0  # nothing alerts under the lax config

    def test_thresholds_env_var(self, tmp_path, monkeypatch):
        from splitaudit import ThresholdConfig, to_json

        strict = tmp_path / "strict.json"
        strict.write_bytes(to_json(ThresholdConfig()))
        monkeypatch.setenv("SPLITAUDIT_THRESHOLDS", str(strict))
        out = tmp_path / "out"
        rc = run(["audit", "--input", str(FIXTURE), *MAPPING_FLAGS, "--split", "loo",
                  "--keep-cold", "--fail-on-alert", "--out-dir", str(out)])
        assert rc == 2

    def test_shipped_default_config_matches_defaults(self):
        from splitaudit import ThresholdConfig, from_json

        shipped = Path(__file__).resolve().parents[1] / "thresholds.default.json"
        assert from_json(shipped.read_bytes()) == ThresholdConfig()

    def test_source_date_epoch_stamps_summary(self, tmp_path, monkeypatch):
        monkeypatch.setenv("SOURCE_DATE_EPOCH", "1719792000")
        out = tmp_path / "out"
        run(["audit", "--input", str(FIXTURE), *MAPPING_FLAGS, "--split", "loo",
             "--out-dir", str(out)])
        summary = from_json((out / "summary.json").read_bytes())
        assert summary.generated_at == 1719792000 * 1000


class TestDateRange:
    def test_timeline_respects_range(self, tmp_path):
        out = tmp_path / "out"
        rc = run(["stats", "--input", str(FIXTURE), *MAPPING_FLAGS,
                  "--granularity", "hour",
                  "--date-range", "100000", "400000", "--out-dir", str(out)])
        assert rc == 0
        tl = from_json((out / "timeline.json").read_bytes())
        assert tl.range_start == 100000 and tl.range_end == 400000
        assert tl.excluded["raw"] > 0

    def test_iso_dates_accepted(self, tmp_path):
        out = tmp_path / "out"
        rc = run(["stats", "--input", str(FIXTURE), *MAPPING_FLAGS,
                  "--date-range", "1970-01-01", "1970-01-02", "--out-dir", str(out)])
        assert rc == 0


class TestCompareCmd:
    def test_compare_bundles(self, tmp_path, capsys):
        b1, b2 = tmp_path / "b1", tmp_path / "b2"
        run(["split", "--input", str(FIXTURE), *MAPPING_FLAGS, "--split", "loo", "--out-dir", str(b1)])
        run(["split", "--input", str(FIXTURE), *MAPPING_FLAGS, "--split", "gts",
             "--q-val", "0.7", "--q-test", "0.85", "--target", "all", "--out-dir", str(b2)])
        out = tmp_path / "cmp"
        rc = run(["compare", "--bundle", str(b1), "--bundle", str(b2), "--out-dir", str(out)])
        assert rc == 0
        text = capsys.readouterr().out
        assert "loo" in text
        matrix = from_json((out / "comparison.json").read_bytes())
        assert len(matrix.rows) == 2

    def test_compare_specs_over_raw(self, tmp_path):
        spec1 = tmp_path / "loo.json"
        spec1.write_text(json.dumps({"strategy": "leave_one_out"}))
        spec2 = tmp_path / "gts.json"
        spec2.write_text(json.dumps({"strategy": "global_temporal", "q_val": 0.7, "q_test": 0.85}))
        out = tmp_path / "cmp"
        rc = run(["compare", "--input", str(FIXTURE), *MAPPING_FLAGS,
                  "--split-spec", str(spec1), "--split-spec", str(spec2),
                  "--out-dir", str(out)])
        assert rc == 0

    def test_single_bundle_is_error(self, tmp_path, capsys):
        b1 = tmp_path / "b1"
        run(["split", "--input", str(FIXTURE), *MAPPING_FLAGS, "--out-dir", str(b1)])
        rc = run(["compare", "--bundle", str(b1), "--out-dir", str(tmp_path / "c")])
        assert rc == 1
        assert "two bundles" in capsys.readouterr().err
