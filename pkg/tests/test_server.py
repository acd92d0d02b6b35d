import json
import threading
from pathlib import Path

import pytest
from fastapi.testclient import TestClient

from splitaudit import from_json
from splitaudit.serialize import SCHEMA_VERSION
from splitaudit.server import ServerConfig, create_app

FIXTURE = Path(__file__).parent / "data" / "fixture_20.csv"

MAPPING = {"timestamp_format": "epoch_seconds"}


@pytest.fixture
def client():
    app = create_app(ServerConfig(max_upload_bytes=100_000))
    with TestClient(app) as c:
        yield c


@pytest.fixture
def dataset_id(client):
    r = client.post(
        "/api/v1/datasets",
        json={"path": str(FIXTURE), "mapping": MAPPING, "name": "fixture"},
    )
    assert r.status_code == 200, r.text
    return r.json()["dataset_id"]


@pytest.fixture
def bundle_id(client, dataset_id):
    r = client.post(
        "/api/v1/splits",
        json={
            "dataset_id": dataset_id,
            "split": {"strategy": "leave_one_out", "filter_cold_items": False},
        },
    )
    assert r.status_code == 200, r.text
    return r.json()["bundle_id"]


class TestDatasets:
    def test_register_by_path(self, client, dataset_id):
        assert dataset_id.startswith("ds-")

    def test_register_by_content(self, client):
        content = FIXTURE.read_text()
        r = client.post("/api/v1/datasets", json={"content": content, "mapping": MAPPING})
        assert r.status_code == 200
        assert r.json()["n_interactions"] == 20

    def test_upload_too_large_413(self):
        app = create_app(ServerConfig(max_upload_bytes=64))
        with TestClient(app) as c:
            r = c.post("/api/v1/datasets", json={"content": "x" * 200, "mapping": MAPPING})
            assert r.status_code == 413
            assert r.json()["error"]["code"] == "upload_too_large"

    def test_bad_mapping_400(self, client):
        r = client.post(
            "/api/v1/datasets",
            json={"path": str(FIXTURE), "mapping": {"timestamp_format": "nope"}},
        )
        assert r.status_code == 400
        assert "error" in r.json()

    def test_missing_source_400(self, client):
        r = client.post("/api/v1/datasets", json={"mapping": MAPPING})
        assert r.status_code == 400


class TestSplits:
    def test_returns_description(self, client, dataset_id):
        r = client.post(
            "/api/v1/splits",
            json={"dataset_id": dataset_id, "split": {"strategy": "leave_one_out"}},
        )
        body = r.json()
        assert body["bundle_id"].startswith("bundle-")
        desc = body["description"]
        assert desc["kind"] == "SplitDescription"
        assert desc["payload"]["strategy"] == "leave_one_out"

    def test_invalid_quantiles_400(self, client, dataset_id):
        r = client.post(
            "/api/v1/splits",
            json={
                "dataset_id": dataset_id,
                "split": {"strategy": "global_temporal", "q_val": 0.9, "q_test": 0.8},
            },
        )
        assert r.status_code == 400
        assert r.json()["error"]["code"] == "invalid_params"

    def test_unknown_dataset_404(self, client):
        r = client.post(
            "/api/v1/splits",
            json={"dataset_id": "ds-9999", "split": {"strategy": "leave_one_out"}},
        )
        assert r.status_code == 404

    def test_preprocess_registers_role(self, client, dataset_id):
        r = client.post(
            "/api/v1/splits",
            json={
                "dataset_id": dataset_id,
                "split": {"strategy": "leave_one_out"},
                "preprocess": {"drop_consecutive_repeats": True},
            },
        )
        assert r.status_code == 200
        r2 = client.get(f"/api/v1/{dataset_id}/stats", params={"subset": "preprocessed"})
        assert r2.status_code == 200
        assert from_json(r2.content).n_interactions == 18


class TestStatsEndpoints:
    def test_stats_roundtrips(self, client, dataset_id):
        r = client.get(f"/api/v1/{dataset_id}/stats", params={"subset": "raw"})
        assert r.status_code == 200
        report = from_json(r.content)
        assert report.n_interactions == 20

    def test_reference_gives_comparison(self, client, bundle_id):
        r = client.get(
            f"/api/v1/{bundle_id}/stats",
            params={"subset": "test_input", "reference": "train"},
        )
        assert r.status_code == 200
        assert json.loads(r.content)["kind"] == "ComparisonTable"

    def test_unknown_role_400(self, client, dataset_id):
        r = client.get(f"/api/v1/{dataset_id}/stats", params={"subset": "train"})
        assert r.status_code == 400

    def test_unknown_id_404(self, client):
        r = client.get("/api/v1/nope/stats")
        assert r.status_code == 404

    def test_timeline(self, client, bundle_id):
        r = client.get(f"/api/v1/{bundle_id}/timeline", params={"granularity": "day"})
        assert r.status_code == 200
        report = from_json(r.content)
        assert "train" in report.buckets

    def test_timeline_bad_granularity(self, client, dataset_id):
        r = client.get(f"/api/v1/{dataset_id}/timeline", params={"granularity": "decade"})
        assert r.status_code == 400


class TestDiagnosticsEndpoints:
    def test_leakage_loo(self, client, bundle_id):
        r = client.get(f"/api/v1/{bundle_id}/leakage", params={"eval": "test"})
        assert r.status_code == 200
        report = from_json(r.content)
        assert report.leaked_target_pct > 0

    def test_gts_bundle_leakage_zero(self, client, dataset_id):
        r = client.post(
            "/api/v1/splits",
            json={
                "dataset_id": dataset_id,
                "split": {
                    "strategy": "global_temporal",
                    "q_val": 0.7,
                    "q_test": 0.85,
                    "target_mode": "all_items",
                    "filter_cold_items": False,
                },
            },
        )
        bid = r.json()["bundle_id"]
        leak = from_json(client.get(f"/api/v1/{bid}/leakage").content)
        assert leak.leaked_target_pct == 0.0
        assert leak.shared_interactions == 0

    def test_coldstart_and_shift(self, client, bundle_id):
        r = client.get(f"/api/v1/{bundle_id}/coldstart", params={"eval": "test"})
        assert from_json(r.content).cold_users == 0
        r2 = client.get(f"/api/v1/{bundle_id}/shift", params={"eval": "test"})
        assert r2.status_code == 200
        assert from_json(r2.content).position_ks >= 0.0

    def test_bad_eval_side(self, client, bundle_id):
        r = client.get(f"/api/v1/{bundle_id}/leakage", params={"eval": "sideways"})
        assert r.status_code == 400


class TestSummaryAndCompare:
    def test_summary_idempotent(self, client, bundle_id):
        a = client.get(f"/api/v1/{bundle_id}/summary")
        b = client.get(f"/api/v1/{bundle_id}/summary")
        assert a.status_code == 200
        assert a.content == b.content
        summary = from_json(a.content)
        assert {c.metric for c in summary.cards} >= {"leaked_target_pct", "collision_rate_pct"}

    def test_inline_thresholds(self, client, bundle_id):
        inline = json.dumps({"leaked_target_pct": [99.0, 99.5]})
        r = client.get(f"/api/v1/{bundle_id}/summary", params={"thresholds": inline})
        assert r.status_code == 200
        summary = from_json(r.content)
        card = next(c for c in summary.cards if c.metric == "leaked_target_pct")
        assert card.status == "ok"

    def test_stored_thresholds(self, client, bundle_id):
        r = client.post(
            "/api/v1/thresholds",
            json={"config": {"leaked_target_pct": [99.0, 99.5]}},
        )
        tid = r.json()["thresholds_id"]
        r2 = client.get(f"/api/v1/{bundle_id}/summary", params={"thresholds": tid})
        assert r2.status_code == 200

    def test_bad_thresholds_400(self, client, bundle_id):
        r = client.get(f"/api/v1/{bundle_id}/summary", params={"thresholds": "{broken"})
        assert r.status_code == 400

    def test_compare(self, client, dataset_id, bundle_id):
        r = client.post(
            "/api/v1/splits",
            json={
                "dataset_id": dataset_id,
                "split": {"strategy": "global_temporal", "q_val": 0.7, "q_test": 0.85,
                          "target_mode": "all_items", "filter_cold_items": False},
            },
        )
        other = r.json()["bundle_id"]
        r2 = client.post("/api/v1/compare", json={"bundle_ids": [bundle_id, other]})
        assert r2.status_code == 200
        matrix = from_json(r2.content)
        assert len(matrix.rows) == 2

    def test_compare_needs_two(self, client, bundle_id):
        r = client.post("/api/v1/compare", json={"bundle_ids": [bundle_id]})
        assert r.status_code == 400

    def test_compare_unknown_404(self, client, bundle_id):
        r = client.post("/api/v1/compare", json={"bundle_ids": [bundle_id, "bundle-404"]})
        assert r.status_code == 404


class TestPersistence:
    def test_bundles_survive_restart(self, tmp_path):
        cfg = ServerConfig(persist_dir=str(tmp_path / "store"))
        with TestClient(create_app(cfg)) as c:
            ds = c.post(
                "/api/v1/datasets",
                json={"path": str(FIXTURE), "mapping": MAPPING},
            ).json()["dataset_id"]
            bid = c.post(
                "/api/v1/splits",
                json={"dataset_id": ds, "split": {"strategy": "leave_one_out",
                                                  "filter_cold_items": False}},
            ).json()["bundle_id"]
            before = c.get(f"/api/v1/{bid}/leakage").content

        # a fresh process: bundles reload from disk, datasets are gone
        with TestClient(create_app(cfg)) as c2:
            after = c2.get(f"/api/v1/{bid}/leakage").content
            assert after == before
            # id counter resumes past restored bundles
            ds2 = c2.post(
                "/api/v1/datasets",
                json={"path": str(FIXTURE), "mapping": MAPPING},
            ).json()["dataset_id"]
            bid2 = c2.post(
                "/api/v1/splits",
                json={"dataset_id": ds2, "split": {"strategy": "leave_one_out"}},
            ).json()["bundle_id"]
            assert bid2 != bid


class TestProtocol:
    def test_every_get_roundtrips_schema(self, client, dataset_id, bundle_id):
        urls = [
            (f"/api/v1/{dataset_id}/stats", {"subset": "raw"}),
            (f"/api/v1/{dataset_id}/temporal", {"subset": "raw"}),
            (f"/api/v1/{dataset_id}/repeats", {"subset": "raw"}),
            (f"/api/v1/{bundle_id}/timeline", {}),
            (f"/api/v1/{bundle_id}/leakage", {}),
            (f"/api/v1/{bundle_id}/coldstart", {}),
            (f"/api/v1/{bundle_id}/shift", {}),
            (f"/api/v1/{bundle_id}/summary", {}),
            (f"/api/v1/{bundle_id}/description", {}),
        ]
        for url, params in urls:
            r = client.get(url, params=params)
            assert r.status_code == 200, (url, r.text)
            doc = json.loads(r.content)
            assert doc["schema_version"] == SCHEMA_VERSION
            from_json(r.content)  # must not raise

    def test_concurrent_identical_gets(self, client, bundle_id):
        results = []

        def hit():
            results.append(client.get(f"/api/v1/{bundle_id}/summary").content)

        threads = [threading.Thread(target=hit) for _ in range(8)]
        for t in threads:
            t.start()
        for t in threads:
            t.join()
        assert len(set(results)) == 1
