"""Helpers shared by the dataclass configs' to_dict/from_dict methods."""

from __future__ import annotations

import hashlib
import json
from dataclasses import fields, is_dataclass
from typing import Any

from shiplabel_qi.core.errors import ConfigError


def check_keys(cls: type, data: dict[str, Any]) -> None:
    """Reject keys that are not fields of the dataclass cls."""
    if not isinstance(data, dict):
        raise ConfigError(f"{cls.__name__} expects a JSON object, got {type(data).__name__}")
    assert is_dataclass(cls)
    known = {f.name for f in fields(cls)}
    unknown = sorted(set(data) - known)
    if unknown:
        raise ConfigError(f"Unknown {cls.__name__} keys: {', '.join(unknown)}")


def canonical_json(data: Any) -> str:
    """Compact JSON with sorted keys, stable across runs."""
    return json.dumps(data, sort_keys=True, separators=(",", ":"))


def stable_hash(data: Any) -> str:
    """sha256 of the canonical JSON form."""
    return hashlib.sha256(canonical_json(data).encode("utf-8")).hexdigest()
