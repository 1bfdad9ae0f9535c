"""Render results as JSON documents and JSONL streams.

Reports are written with sorted keys so that identical runs produce
identical bytes. JSONL records use the compact canonical form, one record
per line.
"""

from __future__ import annotations

import json
import math
from collections.abc import Iterable
from typing import Any

from shiplabel_qi.core.serial import canonical_json


def _clean(value: Any) -> Any:
    """Replace NaN and infinities with None; JSON has no spelling for them."""
    if isinstance(value, float) and not math.isfinite(value):
        return None
    if isinstance(value, dict):
        return {k: _clean(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_clean(v) for v in value]
    return value


class JsonRenderer:
    """Render a dict as an indented JSON document."""

    def __init__(self, indent: int | None = 2):
        self.indent = indent

    def render(self, data: dict[str, Any]) -> str:
        return json.dumps(_clean(data), indent=self.indent, sort_keys=True, ensure_ascii=False) + "\n"


class JsonlRenderer:
    """Render records as JSON Lines."""

    def render(self, records: Iterable[dict[str, Any]]) -> str:
        return "".join(self.line(r) for r in records)

    def line(self, record: dict[str, Any]) -> str:
        return canonical_json(_clean(record)) + "\n"
