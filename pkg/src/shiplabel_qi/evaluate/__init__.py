"""Cross-validation folds, classification reports and run summaries."""

from shiplabel_qi.evaluate.folds import FoldPlan, holdout_split, kfold_split
from shiplabel_qi.evaluate.report import ClassificationReport, evaluate_classifier
from shiplabel_qi.evaluate.summary import RunSummary, summarize_runs

__all__ = [
    "FoldPlan",
    "holdout_split",
    "kfold_split",
    "ClassificationReport",
    "evaluate_classifier",
    "RunSummary",
    "summarize_runs",
]
