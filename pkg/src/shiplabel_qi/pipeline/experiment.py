"""k-fold comparison of global-only, voting and stacked classification."""

from __future__ import annotations

import logging
import math
from collections import Counter
from collections.abc import Sequence
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Union

from shiplabel_qi.core.errors import IoFailure
from shiplabel_qi.core.labels import QualityClass
from shiplabel_qi.core.rng import derive_seed
from shiplabel_qi.evaluate.folds import FoldPlan, holdout_split, kfold_split
from shiplabel_qi.evaluate.report import ClassificationReport, evaluate_classifier
from shiplabel_qi.evaluate.summary import RunSummary, summarize_runs
from shiplabel_qi.nn.extractor import EXTRACTOR_BRANCHES
from shiplabel_qi.pipeline.config import PipelineConfig
from shiplabel_qi.pipeline.inputs import BranchInputs, InputSpec, prepare_dataset
from shiplabel_qi.pipeline.model import QualityModel, input_spec
from shiplabel_qi.render.json_format import JsonRenderer
from shiplabel_qi.render.text import accuracy_table, per_class_table
from shiplabel_qi.synth.dataset import DatasetManifest
from shiplabel_qi.transform.geometry import AugmentOp

logger = logging.getLogger(__name__)

GLOBAL_ONLY = "Only global features"
MAJORITY = "Global-local fusion (majority voting)"
WEIGHTED = "Global-local fusion (weighted majority voting)"
STACKED = "Global-local fusion (stacked)"
VARIANTS = (GLOBAL_ONLY, MAJORITY, WEIGHTED, STACKED)

REPORT_FILE = "report.json"
TABLES_FILE = "tables.txt"

AUGMENT_OPS = (AugmentOp.FLIP_H, AugmentOp.FLIP_V, AugmentOp.ROT180, AugmentOp.ROT90, AugmentOp.ROT270)


@dataclass
class FoldResult:
    fold: int
    train_size: int
    validation_size: int
    test_size: int
    reports: dict[str, ClassificationReport]
    vote_weights: list[float]

    def to_dict(self) -> dict[str, Any]:
        return {
            "fold": self.fold,
            "train_size": self.train_size,
            "validation_size": self.validation_size,
            "test_size": self.test_size,
            "vote_weights": self.vote_weights,
            "reports": {name: r.to_dict() for name, r in self.reports.items()},
        }


@dataclass
class ExperimentReport:
    """Per-fold reports and their mean ± std summaries."""
    plan: FoldPlan
    folds: list[FoldResult] = field(default_factory=list)

    def accuracies(self, variant: str) -> list[float]:
        return [f.reports[variant].accuracy for f in self.folds]

    def summaries(self) -> dict[str, RunSummary]:
        return {v: summarize_runs(self.accuracies(v)) for v in VARIANTS}

    def per_class(self) -> dict[str, dict[QualityClass, RunSummary]]:
        """Per-class accuracy summaries; a class absent from a fold is skipped there."""
        result: dict[str, dict[QualityClass, RunSummary]] = {}
        for variant in VARIANTS:
            by_class = {}
            for cls in QualityClass:
                values = [
                    f.reports[variant].per_class_accuracy[cls]
                    for f in self.folds
                    if not math.isnan(f.reports[variant].per_class_accuracy[cls])
                ]
                if len(values) >= 2:
                    by_class[cls] = summarize_runs(values)
            result[variant] = by_class
        return result

    def to_dict(self) -> dict[str, Any]:
        return {
            "k": self.plan.k,
            "seed": self.plan.seed,
            "quota": self.plan.quota,
            "folds": [f.to_dict() for f in self.folds],
            "summary": {name: s.to_dict() for name, s in self.summaries().items()},
            "per_class": {
                name: {c.label: s.to_dict() for c, s in by_class.items()}
                for name, by_class in self.per_class().items()
            },
        }

    def tables(self) -> str:
        return (
            "Classification accuracy (mean ± std over folds)\n\n"
            + accuracy_table(self.summaries())
            + "\nPer-class accuracy\n\n"
            + per_class_table(self.per_class())
        )

    def write(self, directory: Union[str, Path]) -> None:
        root = Path(directory)
        try:
            root.mkdir(parents=True, exist_ok=True)
            (root / REPORT_FILE).write_text(JsonRenderer().render(self.to_dict()), encoding="utf-8")
            (root / TABLES_FILE).write_text(self.tables(), encoding="utf-8")
        except OSError as e:
            raise IoFailure(f"Cannot write reports to {root}: {e}") from e


def minority_plan(
    indices: Sequence[int], labels: Sequence[QualityClass]
) -> dict[AugmentOp, list[int]]:
    """
    Augmented copies that bring every class up to the largest class count.

    Copies cycle through AUGMENT_OPS (outer) and the class members in index
    order (inner).
    """
    counts = Counter(int(labels[i]) for i in indices)
    target = max(counts.values(), default=0)
    plan: dict[AugmentOp, list[int]] = {op: [] for op in AUGMENT_OPS}
    for cls, count in sorted(counts.items()):
        members = sorted(i for i in indices if int(labels[i]) == cls)
        deficit = min(target - count, len(members) * len(AUGMENT_OPS))
        for k in range(deficit):
            plan[AUGMENT_OPS[k // len(members)]].append(members[k % len(members)])
    return {op: sorted(idx) for op, idx in plan.items() if idx}


class CrossValidationExperiment:
    """
    Train and evaluate one model per fold.

    Branch inputs are prepared once for the whole dataset; each fold holds
    out a stratified validation split of its training images to weight the
    branch votes.
    """

    def __init__(self, config: PipelineConfig, manifest: DatasetManifest):
        self.config = config
        self.manifest = manifest
        self.spec: InputSpec = input_spec(config)

    def plan(self) -> FoldPlan:
        ev = self.config.eval
        return kfold_split(self.manifest, ev.k, ev.seed, ev.quota)

    def _augmentation(self, indices: list[int]) -> tuple[list[BranchInputs], list[QualityClass]]:
        labels = self.manifest.labels
        parts, extra_labels = [], []
        for op, idx in minority_plan(indices, labels).items():
            parts.append(prepare_dataset(self.manifest, idx, self.spec, ops=(op,)))
            extra_labels.extend(labels[i] for i in idx)
        if extra_labels:
            logger.info("Augmented minority classes with %d images", len(extra_labels))
        return parts, extra_labels

    def run_fold(self, fold: int, plan: FoldPlan, inputs: BranchInputs) -> FoldResult:
        labels = self.manifest.labels
        ev = self.config.eval
        train_idx = plan.train_indices(fold)
        fit_idx, val_idx = holdout_split(
            train_idx, [labels[i] for i in train_idx], ev.validation_fraction, derive_seed(ev.seed, fold)
        )
        train_inputs = inputs.take(fit_idx)
        train_labels = [labels[i] for i in fit_idx]
        if ev.augment_minority:
            extra, extra_labels = self._augmentation(fit_idx)
            train_inputs = BranchInputs.concat([train_inputs, *extra])
            train_labels += extra_labels

        logger.info(
            "Fold %d/%d: %d train, %d validation, %d test",
            fold + 1, plan.k, len(train_labels), len(val_idx), len(plan.folds[fold]),
        )
        model = QualityModel.train(
            train_inputs,
            train_labels,
            self.config,
            validation=(inputs.take(val_idx), [labels[i] for i in val_idx]),
        )
        test_idx = plan.test_indices(fold)
        truth = [labels[i] for i in test_idx]
        outputs = model.predict(inputs.take(test_idx))
        reports = {
            GLOBAL_ONLY: evaluate_classifier(outputs.global_only(), truth),
            MAJORITY: evaluate_classifier(outputs.majority(), truth),
            WEIGHTED: evaluate_classifier(outputs.weighted_majority(model.weight_list), truth),
            STACKED: evaluate_classifier(outputs.stacked_classes(), truth),
        }
        for name, report in reports.items():
            logger.info("Fold %d %s: accuracy %.4f", fold + 1, name, report.accuracy)
        return FoldResult(
            fold=fold,
            train_size=len(train_labels),
            validation_size=len(val_idx),
            test_size=len(test_idx),
            reports=reports,
            vote_weights=[model.vote_weights[b] for b in EXTRACTOR_BRANCHES],
        )

    def run(self) -> ExperimentReport:
        plan = self.plan()
        inputs = prepare_dataset(self.manifest, range(len(self.manifest)), self.spec)
        report = ExperimentReport(plan)
        for fold in range(plan.k):
            report.folds.append(self.run_fold(fold, plan, inputs))
        for name, summary in report.summaries().items():
            logger.info("%s: %s", name, summary)
        return report
