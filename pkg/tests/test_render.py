"""Tests for text tables and JSON renderers."""

import json

from shiplabel_qi.core.labels import QualityClass
from shiplabel_qi.detect.metrics import DetectionMetrics
from shiplabel_qi.detect.roi import RegionKind
from shiplabel_qi.evaluate.summary import RunSummary
from shiplabel_qi.render import (
    JsonlRenderer,
    JsonRenderer,
    TableRenderer,
    accuracy_table,
    detection_table,
    per_class_table,
)


class TestTableRenderer:
    """Tests for aligned plain-text tables."""

    def test_alignment(self) -> None:
        text = TableRenderer().render(["A", "Bee"], [["xx", "y"]])
        assert text == "A   Bee\n--  ---\nxx  y\n"

    def test_custom_gap_and_rule(self) -> None:
        text = TableRenderer(gap=1, rule="=").render(["Name", "N"], [["a", "10"], ["bcdef", "2"]])
        assert text.splitlines() == ["Name  N", "===== ==", "a     10", "bcdef 2"]

    def test_no_rows(self) -> None:
        assert TableRenderer().render(["Method", "Accuracy"], []) == "Method  Accuracy\n------  --------\n"


class TestReportTables:
    """Tests for the accuracy, per-class and detection tables."""

    def test_accuracy_table(self) -> None:
        text = accuracy_table({
            "Only global features": RunSummary((0.9, 0.92), 0.91, 0.01),
            "Global-local fusion (stacked)": RunSummary((0.99, 0.99), 0.99, 0.0),
        })
        lines = text.splitlines()
        assert lines[0].split() == ["Method", "Accuracy"]
        assert lines[2].startswith("Only global features")
        assert lines[2].endswith("91.00 ± 1.00%")
        assert lines[3].endswith("99.00 ± 0.00%")
        assert lines[2].index("91.00") == lines[3].index("99.00")

    def test_per_class_table(self) -> None:
        summary = RunSummary((1.0, 1.0), 1.0, 0.0)
        text = per_class_table({"Stacked": {c: summary for c in QualityClass if c is not QualityClass.DAMAGED}})
        header, _, row = text.splitlines()
        assert header.split() == ["Method", "Normal", "Contaminated", "Unreadable", "Handwritten", "Damaged"]
        assert row.endswith("n/a")
        assert row.count("100.00 ± 0.00%") == 4

    def test_detection_table(self) -> None:
        metrics = DetectionMetrics(
            ap_per_kind={RegionKind.BARCODE: 0.9, RegionKind.ADDRESS: 0.5},
            support={RegionKind.BARCODE: 10, RegionKind.ADDRESS: 8},
        )
        lines = detection_table(metrics).splitlines()
        assert lines[0].split() == ["Region", "Support", "AP@0.5"]
        assert lines[2].split() == ["barcode", "10", "0.900"]
        assert lines[3].split() == ["address", "8", "0.500"]
        assert lines[4].split() == ["mAP", "0.700"]


class TestJson:
    """Tests for JSON documents and JSONL streams."""

    def test_sorted_and_indented(self) -> None:
        text = JsonRenderer().render({"b": 1, "a": [1, 2]})
        assert text.endswith("\n")
        assert text.index('"a"') < text.index('"b"')
        assert json.loads(text) == {"a": [1, 2], "b": 1}

    def test_nan_becomes_null(self) -> None:
        text = JsonRenderer(indent=None).render({"acc": float("nan"), "nested": {"x": [float("inf"), 0.5]}})
        assert json.loads(text) == {"acc": None, "nested": {"x": [None, 0.5]}}

    def test_jsonl_lines(self) -> None:
        text = JsonlRenderer().render([{"b": 2, "a": 1}, {"c": float("nan")}])
        assert text == '{"a":1,"b":2}\n{"c":null}\n'

    def test_jsonl_empty(self) -> None:
        assert JsonlRenderer().render([]) == ""
