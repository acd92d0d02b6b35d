"""HTTP API serving datasets, bundles, and diagnostics for the dashboard.

Stateless JSON protocol over an in-process session store: registered logs
are immutable, every response body is a reporting-schema document, and GET
responses are cached so concurrent identical requests observe identical
bytes (compute happens outside the lock, publish is atomic).
"""
from __future__ import annotations

import json
import os
import tempfile
import threading
from dataclasses import dataclass, field

from fastapi import FastAPI, Request, Response
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from .errors import AuditError
from .diagnostics import cold_start, compare_splits, distribution_shift, leakage
from .ingest import ColumnMapping, parse_log
from .log import InteractionLog
from .preprocess import PreprocessSpec, apply_preprocessing
from .report import ThresholdConfig, summarize
from .serialize import to_json
from .split import SplitBundle, SplitSpec, describe_split, load_bundle, make_split, save_bundle
from .stats import GRANULARITIES, compare_stats, core_stats, repeat_stats, temporal_stats, timeline

API_PREFIX = "/api/v1"


@dataclass(frozen=True)
class ServerConfig:
    cors_origins: tuple[str, ...] = ("*",)
    max_upload_bytes: int = 50 * 1024 * 1024
    persist_dir: str | None = None  # bundles survive restarts when set


@dataclass
class _Dataset:
    name: str
    roles: dict[str, InteractionLog]


@dataclass
class _Bundle:
    bundle: SplitBundle
    dataset_id: str


@dataclass
class SessionStore:
    datasets: dict[str, _Dataset] = field(default_factory=dict)
    bundles: dict[str, _Bundle] = field(default_factory=dict)
    thresholds: dict[str, ThresholdConfig] = field(default_factory=dict)
    cache: dict[tuple, bytes] = field(default_factory=dict)
    lock: threading.Lock = field(default_factory=threading.Lock)
    _counter: int = 0

    def next_id(self, prefix: str) -> str:
        with self.lock:
            self._counter += 1
            return f"{prefix}-{self._counter:04d}"


class _ApiError(Exception):
    def __init__(self, status: int, code: str, message: str):
        self.status = status
        self.code = code
        self.message = message


def _error_response(status: int, code: str, message: str) -> JSONResponse:
    return JSONResponse({"error": {"code": code, "message": message}}, status_code=status)


def _report_response(data: bytes) -> Response:
    return Response(content=data, media_type="application/json")


def _restore_bundles(store: SessionStore, persist_dir: str) -> None:
    """Reload bundles saved by previous sessions (one subdirectory each)."""
    if not os.path.isdir(persist_dir):
        return
    highest = 0
    for name in sorted(os.listdir(persist_dir)):
        path = os.path.join(persist_dir, name)
        if not (name.startswith("bundle-") and os.path.isdir(path)):
            continue
        try:
            bundle = load_bundle(path)
        except (OSError, ValueError, AuditError):
            continue  # ignore foreign or broken directories
        store.bundles[name] = _Bundle(bundle=bundle, dataset_id="")
        suffix = name.removeprefix("bundle-")
        if suffix.isdigit():
            highest = max(highest, int(suffix))
    store._counter = max(store._counter, highest)


def create_app(config: ServerConfig = ServerConfig(), store: SessionStore | None = None) -> FastAPI:
    app = FastAPI(title="splitaudit", docs_url=None, redoc_url=None)
    app.add_middleware(
        CORSMiddleware,
        allow_origins=list(config.cors_origins),
        allow_methods=["*"],
        allow_headers=["*"],
    )
    store = store if store is not None else SessionStore()
    app.state.store = store
    app.state.config = config
    if config.persist_dir:
        _restore_bundles(store, config.persist_dir)

    @app.exception_handler(_ApiError)
    async def _api_error(_req, exc: _ApiError):
        return _error_response(exc.status, exc.code, exc.message)

    @app.exception_handler(AuditError)
    async def _audit_error(_req, exc: AuditError):
        return _error_response(400, type(exc).__name__, str(exc))

    # -- helpers ---------------------------------------------------------

    def _dataset(dataset_id: str) -> _Dataset:
        ds = store.datasets.get(dataset_id)
        if ds is None:
            raise _ApiError(404, "unknown_id", f"no dataset {dataset_id!r}")
        return ds

    def _bundle(bundle_id: str) -> _Bundle:
        b = store.bundles.get(bundle_id)
        if b is None:
            raise _ApiError(404, "unknown_id", f"no bundle {bundle_id!r}")
        return b

    def _resolve_log(any_id: str, role: str) -> InteractionLog:
        if any_id in store.datasets:
            ds = store.datasets[any_id]
            if role not in ds.roles:
                raise _ApiError(
                    400, "invalid_params",
                    f"dataset {any_id!r} has roles {sorted(ds.roles)}, not {role!r}",
                )
            return ds.roles[role]
        if any_id in store.bundles:
            entry = store.bundles[any_id]
            try:
                return entry.bundle.subset(role)
            except KeyError:
                raise _ApiError(400, "invalid_params", f"unknown bundle role {role!r}") from None
        raise _ApiError(404, "unknown_id", f"no dataset or bundle {any_id!r}")

    def _all_roles(any_id: str) -> dict[str, InteractionLog]:
        if any_id in store.datasets:
            return dict(store.datasets[any_id].roles)
        if any_id in store.bundles:
            b = store.bundles[any_id].bundle
            return {
                r: b.subset(r)
                for r in ("train", "val_input", "val_target", "test_input", "test_target")
            }
        raise _ApiError(404, "unknown_id", f"no dataset or bundle {any_id!r}")

    def _cached(key: tuple, compute) -> Response:
        hit = store.cache.get(key)
        if hit is not None:
            return _report_response(hit)
        body = compute()  # outside the lock; idempotent by construction
        with store.lock:
            body = store.cache.setdefault(key, body)
        return _report_response(body)

    def _eval_side(value: str) -> str:
        if value not in ("validation", "test"):
            raise _ApiError(400, "invalid_params", "eval must be 'validation' or 'test'")
        return value

    async def _json_body(request: Request) -> dict:
        raw = await request.body()
        if len(raw) > config.max_upload_bytes:
            raise _ApiError(413, "upload_too_large",
                            f"body exceeds {config.max_upload_bytes} bytes")
        try:
            body = json.loads(raw)
        except json.JSONDecodeError as exc:
            raise _ApiError(400, "invalid_params", f"invalid JSON body: {exc}") from None
        if not isinstance(body, dict):
            raise _ApiError(400, "invalid_params", "body must be a JSON object")
        return body

    # -- endpoints -------------------------------------------------------

    @app.post(API_PREFIX + "/datasets")
    async def register_dataset(request: Request):
        body = await _json_body(request)
        mapping_dict = body.get("mapping", {})
        if not isinstance(mapping_dict, dict):
            raise _ApiError(400, "invalid_params", "mapping must be an object")
        try:
            mapping = ColumnMapping(**mapping_dict)
        except (TypeError, ValueError) as exc:
            raise _ApiError(400, "invalid_params", f"bad mapping: {exc}") from None
        role = body.get("role", "raw")

        if "content" in body:
            if not isinstance(body["content"], str):
                raise _ApiError(400, "invalid_params", "content must be CSV text")
            with tempfile.NamedTemporaryFile(
                "w", suffix=".csv", delete=False, encoding="utf-8"
            ) as tmp:
                tmp.write(body["content"])
                path = tmp.name
            try:
                log = parse_log(path, mapping, role)
            finally:
                os.unlink(path)
        elif "path" in body:
            try:
                log = parse_log(body["path"], mapping, role)
            except FileNotFoundError as exc:
                raise _ApiError(400, "invalid_params", str(exc)) from None
        else:
            raise _ApiError(400, "invalid_params", "provide 'path' or 'content'")

        dataset_id = store.next_id("ds")
        name = body.get("name", dataset_id)
        with store.lock:
            store.datasets[dataset_id] = _Dataset(name=name, roles={role: log})
        return {
            "dataset_id": dataset_id,
            "n_interactions": len(log),
            "n_users": log.n_users,
            "n_items": log.n_items,
        }

    @app.post(API_PREFIX + "/splits")
    async def create_split(request: Request):
        body = await _json_body(request)
        ds_id = body.get("dataset_id")
        if not isinstance(ds_id, str):
            raise _ApiError(400, "invalid_params", "dataset_id is required")
        ds = _dataset(ds_id)
        try:
            spec = SplitSpec.from_dict(body.get("split", {}))
        except (TypeError, ValueError) as exc:
            raise _ApiError(400, "invalid_params", f"bad split spec: {exc}") from None
        source = ds.roles.get("preprocessed", ds.roles.get("raw"))
        if source is None:
            source = next(iter(ds.roles.values()))
        pre_dict = body.get("preprocess")
        pre_label = "none"
        if pre_dict:
            try:
                pre = PreprocessSpec(**pre_dict)
            except (TypeError, ValueError) as exc:
                raise _ApiError(400, "invalid_params", f"bad preprocess spec: {exc}") from None
            source = apply_preprocessing(ds.roles.get("raw", source), pre)
            pre_label = pre.describe()
            with store.lock:
                ds.roles.setdefault("preprocessed", source)
        bundle = make_split(source, spec, provenance=f"{ds.name}|{pre_label}")
        bundle_id = store.next_id("bundle")
        with store.lock:
            store.bundles[bundle_id] = _Bundle(bundle=bundle, dataset_id=ds_id)
        if config.persist_dir:
            save_bundle(bundle, os.path.join(config.persist_dir, bundle_id))
        return Response(
            content=json.dumps(
                {
                    "bundle_id": bundle_id,
                    "description": json.loads(to_json(describe_split(bundle))),
                }
            ),
            media_type="application/json",
        )

    @app.post(API_PREFIX + "/thresholds")
    async def register_thresholds(request: Request):
        body = await _json_body(request)
        try:
            cfg = ThresholdConfig(**{k: tuple(v) for k, v in body.get("config", {}).items()})
        except (TypeError, ValueError) as exc:
            raise _ApiError(400, "invalid_params", f"bad thresholds: {exc}") from None
        t_id = store.next_id("thr")
        with store.lock:
            store.thresholds[t_id] = cfg
        return {"thresholds_id": t_id}

    @app.get(API_PREFIX + "/{any_id}/stats")
    def get_stats(any_id: str, subset: str = "raw", reference: str | None = None):
        return _stat_endpoint(any_id, subset, reference, core_stats, "stats")

    @app.get(API_PREFIX + "/{any_id}/temporal")
    def get_temporal(any_id: str, subset: str = "raw", reference: str | None = None):
        return _stat_endpoint(any_id, subset, reference, temporal_stats, "temporal")

    @app.get(API_PREFIX + "/{any_id}/repeats")
    def get_repeats(any_id: str, subset: str = "raw", reference: str | None = None):
        return _stat_endpoint(any_id, subset, reference, repeat_stats, "repeats")

    def _stat_endpoint(any_id, subset, reference, fn, kind):
        def compute() -> bytes:
            log = _resolve_log(any_id, subset)
            if len(log) == 0:
                raise _ApiError(400, "invalid_params", f"subset {subset!r} is empty")
            if reference:
                ref = _resolve_log(any_id, reference)
                if len(ref) == 0:
                    raise _ApiError(400, "invalid_params", f"reference {reference!r} is empty")
                return to_json(compare_stats(fn(log), fn(ref)))
            return to_json(fn(log))

        return _cached((any_id, kind, subset, reference), compute)

    @app.get(API_PREFIX + "/{any_id}/timeline")
    def get_timeline(
        any_id: str,
        granularity: str = "day",
        start: int | None = None,
        end: int | None = None,
        roles: str | None = None,
    ):
        if granularity not in GRANULARITIES:
            raise _ApiError(400, "invalid_params", f"granularity must be one of {GRANULARITIES}")
        date_range = None
        if (start is None) != (end is None):
            raise _ApiError(400, "invalid_params", "provide both start and end, or neither")
        if start is not None and end is not None:
            date_range = (start, end)

        def compute() -> bytes:
            logs = _all_roles(any_id)
            if roles:
                wanted = roles.split(",")
                missing = [r for r in wanted if r not in logs]
                if missing:
                    raise _ApiError(400, "invalid_params", f"unknown roles {missing}")
                logs = {r: logs[r] for r in wanted}
            logs = {r: lg for r, lg in logs.items() if len(lg)}
            if not logs:
                raise _ApiError(400, "invalid_params", "all requested roles are empty")
            return to_json(timeline(logs, granularity, date_range))

        return _cached((any_id, "timeline", granularity, start, end, roles), compute)

    @app.get(API_PREFIX + "/{bundle_id}/leakage")
    def get_leakage(bundle_id: str, eval: str = "test", granularity: str = "day"):
        side = _eval_side(eval)
        entry = _bundle(bundle_id)
        return _cached(
            (bundle_id, "leakage", side, granularity),
            lambda: to_json(leakage(entry.bundle, side, granularity)),
        )

    @app.get(API_PREFIX + "/{bundle_id}/coldstart")
    def get_coldstart(bundle_id: str, eval: str = "test", granularity: str = "day"):
        side = _eval_side(eval)
        entry = _bundle(bundle_id)
        return _cached(
            (bundle_id, "coldstart", side, granularity),
            lambda: to_json(cold_start(entry.bundle, side, granularity)),
        )

    @app.get(API_PREFIX + "/{bundle_id}/shift")
    def get_shift(bundle_id: str, eval: str = "test", reference: str | None = None):
        side = _eval_side(eval)
        entry = _bundle(bundle_id)

        def compute() -> bytes:
            ds = store.datasets.get(entry.dataset_id)
            ref = None
            if reference:
                ref = _resolve_log(entry.dataset_id if ds else bundle_id, reference)
            elif ds:
                ref = ds.roles.get("preprocessed", ds.roles.get("raw"))
            if ref is None or len(ref) == 0:
                ref = entry.bundle.train
            try:
                return to_json(distribution_shift(entry.bundle, ref, side))
            except AuditError as exc:
                raise _ApiError(400, type(exc).__name__, str(exc)) from None

        return _cached((bundle_id, "shift", side, reference), compute)

    @app.get(API_PREFIX + "/{bundle_id}/description")
    def get_description(bundle_id: str):
        entry = _bundle(bundle_id)
        return _cached(
            (bundle_id, "description"),
            lambda: to_json(describe_split(entry.bundle)),
        )

    @app.get(API_PREFIX + "/{bundle_id}/summary")
    def get_summary(bundle_id: str, thresholds: str | None = None):
        entry = _bundle(bundle_id)
        if thresholds and thresholds in store.thresholds:
            cfg = store.thresholds[thresholds]
            cache_tag = thresholds
        elif thresholds:
            try:
                doc = json.loads(thresholds)
                cfg = ThresholdConfig(**{k: tuple(v) for k, v in doc.items()})
            except (json.JSONDecodeError, TypeError, ValueError, AttributeError) as exc:
                raise _ApiError(
                    400, "invalid_params",
                    f"thresholds must be a stored id or inline JSON object: {exc}",
                ) from None
            cache_tag = json.dumps(doc, sort_keys=True)
        else:
            cfg = ThresholdConfig()
            cache_tag = "default"

        def compute() -> bytes:
            bundle = entry.bundle
            ds = store.datasets.get(entry.dataset_id)
            base = None
            if ds:
                base = ds.roles.get("preprocessed", ds.roles.get("raw"))
            if base is None or len(base) == 0:
                base = bundle.train
            reports = [temporal_stats(base), repeat_stats(base),
                       leakage(bundle, "test"), cold_start(bundle, "test")]
            try:
                reports.append(distribution_shift(bundle, base, "test"))
            except AuditError:
                pass
            name = ds.name if ds else bundle_id
            return to_json(
                summarize(reports, cfg, dataset=name, provenance=bundle.provenance)
            )

        return _cached((bundle_id, "summary", cache_tag), compute)

    @app.post(API_PREFIX + "/compare")
    async def post_compare(request: Request):
        body = await _json_body(request)
        ids = body.get("bundle_ids")
        if not isinstance(ids, list) or len(ids) < 2:
            raise _ApiError(400, "invalid_params", "bundle_ids must list >= 2 bundles")
        side = _eval_side(body.get("eval", "test"))
        entries = [_bundle(i) for i in ids]
        matrix = compare_splits(
            [e.bundle for e in entries], eval_side=side, on_provenance_mismatch="warn"
        )
        return _report_response(to_json(matrix))

    return app
