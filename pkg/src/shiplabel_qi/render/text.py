"""Render results as aligned plain-text tables."""

from __future__ import annotations

from collections.abc import Mapping, Sequence

from shiplabel_qi.core.labels import QualityClass
from shiplabel_qi.detect.metrics import DetectionMetrics
from shiplabel_qi.evaluate.summary import RunSummary


class TableRenderer:
    """Render rows of cells as a left-aligned text table with a header rule."""

    def __init__(self, gap: int = 2, rule: str = "-"):
        self.gap = gap
        self.rule = rule

    def render(self, headers: Sequence[str], rows: Sequence[Sequence[str]]) -> str:
        """Render headers and rows; every row must have len(headers) cells."""
        widths = [len(h) for h in headers]
        for row in rows:
            for i, cell in enumerate(row):
                widths[i] = max(widths[i], len(cell))

        sep = " " * self.gap
        lines = [sep.join(h.ljust(w) for h, w in zip(headers, widths)).rstrip()]
        lines.append(sep.join(self.rule * w for w in widths))
        for row in rows:
            lines.append(sep.join(c.ljust(w) for c, w in zip(row, widths)).rstrip())
        return "\n".join(lines) + "\n"


def accuracy_table(summaries: Mapping[str, RunSummary]) -> str:
    """Method | Accuracy rows in "mean ± std %" form."""
    rows = [[name, summary.format()] for name, summary in summaries.items()]
    return TableRenderer().render(["Method", "Accuracy"], rows)


def per_class_table(per_class: Mapping[str, Mapping[QualityClass, RunSummary]]) -> str:
    """One row per method, one column per quality class."""
    headers = ["Method"] + [c.label.capitalize() for c in QualityClass]
    rows = []
    for name, by_class in per_class.items():
        rows.append([name] + [
            by_class[c].format() if c in by_class else "n/a" for c in QualityClass
        ])
    return TableRenderer().render(headers, rows)


def detection_table(metrics: DetectionMetrics) -> str:
    rows = [
        [kind.value, str(metrics.support.get(kind, 0)), f"{ap:.3f}"]
        for kind, ap in metrics.ap_per_kind.items()
    ]
    rows.append(["mAP", "", f"{metrics.map:.3f}"])
    return TableRenderer().render(
        ["Region", "Support", f"AP@{metrics.iou_threshold:g}"], rows
    )
