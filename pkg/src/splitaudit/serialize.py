"""Versioned JSON serialization for every report type.

Documents are an envelope {"schema_version": N, "kind": "...", "payload": {...}}.
Decoding is strict: the payload must match the dataclass fields and their
declared types exactly, so a round trip is the identity and anything else is
a typed error (SchemaVersionMismatch / MalformedDocument), never a crash.
"""
from __future__ import annotations

import dataclasses
import json
import types
import typing

import numpy as np

from .errors import MalformedDocument, SchemaVersionMismatch

SCHEMA_VERSION = 1

_REGISTRY: dict[str, type] = {}


def register_report(cls):
    """Class decorator / call registering a dataclass as a serializable report."""
    _REGISTRY[cls.__name__] = cls
    return cls


def registered_kinds() -> tuple[str, ...]:
    return tuple(sorted(_REGISTRY))


# ---------------------------------------------------------------------------
# encoding


def _encode(value):
    if value is None or isinstance(value, (bool, int, str)):
        return value
    if isinstance(value, float):
        return value
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (np.floating,)):
        return float(value)
    if dataclasses.is_dataclass(value):
        return {f.name: _encode(getattr(value, f.name)) for f in dataclasses.fields(value)}
    if isinstance(value, (list, tuple)):
        return [_encode(v) for v in value]
    if isinstance(value, dict):
        return {str(k): _encode(v) for k, v in value.items()}
    raise TypeError(f"cannot serialize {type(value).__name__}")


def to_json(report) -> bytes:
    kind = type(report).__name__
    if kind not in _REGISTRY:
        raise TypeError(f"{kind} is not a registered report type")
    doc = {
        "schema_version": SCHEMA_VERSION,
        "kind": kind,
        "payload": _encode(report),
    }
    return (json.dumps(doc, indent=2, ensure_ascii=False) + "\n").encode("utf-8")


# ---------------------------------------------------------------------------
# decoding


def _bad(msg: str) -> MalformedDocument:
    return MalformedDocument(msg)


def _decode(value, hint):
    origin = typing.get_origin(hint)

    if hint is typing.Any:
        return value
    if origin in (typing.Union, types.UnionType):
        args = typing.get_args(hint)
        if value is None:
            if type(None) in args:
                return None
            raise _bad(f"null not allowed for {hint}")
        last_err = None
        for arg in args:
            if arg is type(None):
                continue
            try:
                return _decode(value, arg)
            except MalformedDocument as exc:
                last_err = exc
        raise last_err or _bad(f"no union arm matched for {hint}")

    if hint is float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise _bad(f"expected number, got {type(value).__name__}")
        return float(value)
    if hint is int:
        if isinstance(value, bool) or not isinstance(value, int):
            raise _bad(f"expected integer, got {type(value).__name__}")
        return value
    if hint is bool:
        if not isinstance(value, bool):
            raise _bad(f"expected boolean, got {type(value).__name__}")
        return value
    if hint is str:
        if not isinstance(value, str):
            raise _bad(f"expected string, got {type(value).__name__}")
        return value

    if origin is tuple:
        if not isinstance(value, list):
            raise _bad(f"expected array, got {type(value).__name__}")
        args = typing.get_args(hint)
        if len(args) == 2 and args[1] is Ellipsis:
            return tuple(_decode(v, args[0]) for v in value)
        if len(args) != len(value):
            raise _bad(f"expected {len(args)}-tuple, got {len(value)} elements")
        return tuple(_decode(v, a) for v, a in zip(value, args))

    if origin is dict:
        if not isinstance(value, dict):
            raise _bad(f"expected object, got {type(value).__name__}")
        k_hint, v_hint = typing.get_args(hint)
        if k_hint is not str:
            raise _bad("only string-keyed mappings are supported")
        return {k: _decode(v, v_hint) for k, v in value.items()}

    if isinstance(hint, type) and dataclasses.is_dataclass(hint):
        return _decode_dataclass(value, hint)

    raise _bad(f"unsupported type hint {hint!r}")


def _decode_dataclass(payload, cls):
    if not isinstance(payload, dict):
        raise _bad(f"expected object for {cls.__name__}, got {type(payload).__name__}")
    hints = typing.get_type_hints(cls)
    field_names = [f.name for f in dataclasses.fields(cls)]
    extra = set(payload) - set(field_names)
    if extra:
        raise _bad(f"unknown fields for {cls.__name__}: {sorted(extra)}")
    kwargs = {}
    for f in dataclasses.fields(cls):
        if f.name not in payload:
            raise _bad(f"missing field {f.name!r} for {cls.__name__}")
        kwargs[f.name] = _decode(payload[f.name], hints[f.name])
    try:
        return cls(**kwargs)
    except (TypeError, ValueError) as exc:
        raise _bad(f"invalid {cls.__name__}: {exc}") from None


def from_json(data):
    """Parse a serialized report; inverse of to_json for registered types."""
    if isinstance(data, (bytes, bytearray)):
        try:
            text = bytes(data).decode("utf-8")
        except UnicodeDecodeError as exc:
            raise _bad(f"not utf-8: {exc}") from None
    elif isinstance(data, str):
        text = data
    else:
        raise _bad(f"expected bytes or str, got {type(data).__name__}")
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise _bad(f"invalid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise _bad("document must be a JSON object")
    if "schema_version" not in doc:
        raise _bad("missing schema_version")
    version = doc["schema_version"]
    if not isinstance(version, int) or isinstance(version, bool) or version != SCHEMA_VERSION:
        raise SchemaVersionMismatch(
            f"unsupported schema_version {version!r}; this build reads {SCHEMA_VERSION}"
        )
    kind = doc.get("kind")
    if not isinstance(kind, str) or kind not in _REGISTRY:
        raise _bad(f"unknown report kind {kind!r}")
    if "payload" not in doc:
        raise _bad("missing payload")
    return _decode_dataclass(doc["payload"], _REGISTRY[kind])
