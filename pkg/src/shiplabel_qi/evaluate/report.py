"""Confusion matrix and accuracy report."""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass
from typing import Any

import numpy as np

from shiplabel_qi.core.errors import LengthMismatch
from shiplabel_qi.core.labels import NUM_CLASSES, QualityClass


@dataclass(frozen=True)
class ClassificationReport:
    """
    confusion[true][predicted] over the five classes.

    Per-class accuracy is NaN for a class with no samples.
    """
    confusion: tuple[tuple[int, ...], ...]

    @property
    def n(self) -> int:
        return int(np.asarray(self.confusion).sum())

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(int(s) for s in np.asarray(self.confusion).sum(axis=1))

    @property
    def accuracy(self) -> float:
        matrix = np.asarray(self.confusion)
        return float(np.trace(matrix) / self.n) if self.n else float("nan")

    @property
    def per_class_accuracy(self) -> tuple[float, ...]:
        matrix = np.asarray(self.confusion)
        return tuple(
            float(matrix[c, c] / s) if s else float("nan")
            for c, s in enumerate(self.support)
        )

    def to_dict(self) -> dict[str, Any]:
        return {
            "n": self.n,
            "accuracy": self.accuracy,
            "per_class_accuracy": {
                QualityClass(c).label: (None if np.isnan(a) else a)
                for c, a in enumerate(self.per_class_accuracy)
            },
            "confusion": [list(row) for row in self.confusion],
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> ClassificationReport:
        return cls(tuple(tuple(int(v) for v in row) for row in data["confusion"]))


def evaluate_classifier(
    predictions: Sequence[QualityClass | int], labels: Sequence[QualityClass | int]
) -> ClassificationReport:
    """
    Raises:
        LengthMismatch: predictions and labels differ in length
    """
    if len(predictions) != len(labels):
        raise LengthMismatch(f"{len(predictions)} predictions but {len(labels)} labels")
    matrix = np.zeros((NUM_CLASSES, NUM_CLASSES), dtype=np.int64)
    for pred, true in zip(predictions, labels):
        matrix[int(QualityClass.parse(true)), int(QualityClass.parse(pred))] += 1
    return ClassificationReport(tuple(tuple(int(v) for v in row) for row in matrix))
