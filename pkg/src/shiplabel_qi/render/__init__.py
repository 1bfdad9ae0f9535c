"""Renderers for reports: plain-text tables and JSON/JSONL."""

from shiplabel_qi.render.json_format import JsonlRenderer, JsonRenderer
from shiplabel_qi.render.text import (
    TableRenderer,
    accuracy_table,
    detection_table,
    per_class_table,
)

__all__ = [
    "JsonRenderer",
    "JsonlRenderer",
    "TableRenderer",
    "accuracy_table",
    "detection_table",
    "per_class_table",
]
