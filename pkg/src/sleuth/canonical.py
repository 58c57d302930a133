"""Canonical serialization for cache keys."""

from __future__ import annotations

import hashlib
import json


def canonicalize(value):
    """Deterministic JSON-able form: sets sorted, tuples listed, keys ordered."""
    if isinstance(value, dict):
        return {str(k): canonicalize(value[k]) for k in sorted(value, key=str)}
    if isinstance(value, (set, frozenset)):
        return sorted((canonicalize(v) for v in value), key=lambda x: json.dumps(x, sort_keys=True))
    if isinstance(value, (list, tuple)):
        return [canonicalize(v) for v in value]
    if isinstance(value, bool) or value is None:
        return value
    if isinstance(value, int):
        return value
    if isinstance(value, float):
        return float(value)
    return str(value)


def canonical_json(value) -> str:
    return json.dumps(canonicalize(value), sort_keys=True, separators=(",", ":"))


def binding_key(operation_id: str, bindings: dict, store_version: int = 0) -> str:
    payload = canonical_json({"op": operation_id, "v": store_version, "b": bindings})
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()
