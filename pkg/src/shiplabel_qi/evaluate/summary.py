"""Mean and sample standard deviation over cross-validation folds."""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass
from typing import Any

import numpy as np

from shiplabel_qi.core.errors import TooFewRuns


@dataclass(frozen=True)
class RunSummary:
    values: tuple[float, ...]
    mean: float
    std: float

    def format(self, percent: bool = True) -> str:
        """Format as "mean ± std %" with two decimals (values scaled by 100 when percent)."""
        scale = 100.0 if percent else 1.0
        text = f"{self.mean * scale:.2f} ± {self.std * scale:.2f}"
        return f"{text}%" if percent else text

    def __str__(self) -> str:
        return self.format()

    def to_dict(self) -> dict[str, Any]:
        return {"values": list(self.values), "mean": self.mean, "std": self.std}

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> RunSummary:
        return cls(tuple(float(v) for v in data["values"]), float(data["mean"]), float(data["std"]))


def summarize_runs(values: Sequence[float]) -> RunSummary:
    """
    Mean and sample standard deviation (divisor n - 1).

    Raises:
        TooFewRuns: fewer than two values
    """
    if len(values) < 2:
        raise TooFewRuns(f"Need at least 2 runs to summarize, got {len(values)}")
    arr = np.asarray(values, dtype=np.float64)
    return RunSummary(tuple(float(v) for v in arr), float(arr.mean()), float(arr.std(ddof=1)))
