"""Tests for fold plans, classification reports and run summaries."""

import math
import random

import numpy as np
import pytest

from shiplabel_qi.core.errors import ConfigError, InsufficientData, LengthMismatch, TooFewRuns
from shiplabel_qi.core.labels import QualityClass
from shiplabel_qi.evaluate import (
    ClassificationReport,
    RunSummary,
    evaluate_classifier,
    holdout_split,
    kfold_split,
    summarize_runs,
)


def balanced_labels(per_class: int) -> list[int]:
    return [c for c in range(5) for _ in range(per_class)]


class TestKFold:
    """Tests for stratified k-fold plans."""

    def test_even_folds(self) -> None:
        labels = balanced_labels(100)
        plan = kfold_split(labels, 10, seed=0)
        assert plan.k == 10
        assert all(len(plan.test_indices(f)) == 50 for f in range(10))
        for f in range(10):
            counts = np.bincount([labels[i] for i in plan.test_indices(f)], minlength=5)
            assert counts.tolist() == [10] * 5

    def test_quota(self) -> None:
        labels = balanced_labels(120)
        plan = kfold_split(labels, 10, seed=3, per_class_quota=10)
        for f in range(10):
            counts = np.bincount([labels[i] for i in plan.test_indices(f)], minlength=5)
            assert counts.tolist() == [10] * 5
        assert len(plan.train_only) == 5 * 20
        for f in range(10):
            assert set(plan.train_only) <= set(plan.train_indices(f))

    def test_quota_too_large(self) -> None:
        with pytest.raises(InsufficientData):
            kfold_split(balanced_labels(50), 10, seed=0, per_class_quota=6)

    def test_too_few_images(self) -> None:
        with pytest.raises(InsufficientData):
            kfold_split([0, 1, 2], 5, seed=0)

    def test_bad_k(self) -> None:
        with pytest.raises(ConfigError):
            kfold_split(balanced_labels(5), 1, seed=0)

    def test_partition_property(self) -> None:
        rng = random.Random(17)
        for _ in range(50):
            n = rng.randint(10, 300)
            k = rng.randint(2, 10)
            seed = rng.randrange(2**32)
            labels = [rng.randrange(5) for _ in range(n)]
            plan = kfold_split(labels, k, seed)
            seen = [i for f in range(k) for i in plan.test_indices(f)]
            assert sorted(seen) == list(range(n))
            sizes = [len(plan.test_indices(f)) for f in range(k)]
            assert max(sizes) - min(sizes) <= 1
            for f in range(k):
                train = plan.train_indices(f)
                assert set(train).isdisjoint(plan.test_indices(f))
                assert len(train) + sizes[f] == n

    def test_deterministic(self) -> None:
        labels = balanced_labels(20)
        assert kfold_split(labels, 4, 9) == kfold_split(labels, 4, 9)
        assert kfold_split(labels, 4, 9).folds != kfold_split(labels, 4, 10).folds

    def test_accepts_manifest(self, tiny_dataset) -> None:
        plan = kfold_split(tiny_dataset, 2, seed=0)
        assert plan.size == 10
        assert [len(plan.test_indices(f)) for f in range(2)] == [5, 5]

    def test_to_dict(self) -> None:
        data = kfold_split(balanced_labels(2), 2, seed=1).to_dict()
        assert data["k"] == 2 and data["size"] == 10 and data["quota"] is None
        assert sorted(data["folds"][0] + data["folds"][1]) == list(range(10))


class TestHoldout:
    """Tests for stratified validation holdouts."""

    def test_fraction_per_class(self) -> None:
        labels = balanced_labels(20)
        train, val = holdout_split(list(range(100)), labels, 0.1, seed=0)
        assert np.bincount([labels[i] for i in val], minlength=5).tolist() == [2] * 5
        assert sorted(train + val) == list(range(100))
        assert train == sorted(train) and val == sorted(val)

    def test_at_least_one_when_possible(self) -> None:
        train, val = holdout_split([4, 7, 9], [1, 1, 2], 0.1, seed=0)
        assert len(val) == 1
        assert val[0] in (4, 7)
        assert 9 in train

    def test_zero_fraction(self) -> None:
        train, val = holdout_split([0, 1, 2, 3], [0, 0, 1, 1], 0.0, seed=0)
        assert val == [] and train == [0, 1, 2, 3]

    def test_bad_fraction(self) -> None:
        with pytest.raises(ConfigError):
            holdout_split([0, 1], [0, 0], 1.0, seed=0)


class TestClassificationReport:
    """Tests for confusion matrices and accuracy."""

    def test_perfect(self) -> None:
        report = evaluate_classifier([0, 1, 2, 3, 4], [0, 1, 2, 3, 4])
        assert report.accuracy == 1.0
        assert report.per_class_accuracy == (1.0,) * 5

    def test_confusion_layout(self) -> None:
        report = evaluate_classifier([1, 1, 2], [0, 1, 2])
        assert report.confusion[0][1] == 1
        assert report.confusion[1][1] == 1
        assert report.support == (1, 1, 1, 0, 0)
        assert report.accuracy == pytest.approx(2 / 3)
        per_class = report.per_class_accuracy
        assert per_class[:3] == (0.0, 1.0, 1.0)
        assert math.isnan(per_class[3]) and math.isnan(per_class[4])

    def test_accuracy_is_trace_over_n(self) -> None:
        rng = np.random.default_rng(0)
        preds = rng.integers(0, 5, size=200)
        labels = rng.integers(0, 5, size=200)
        report = evaluate_classifier(preds.tolist(), labels.tolist())
        assert report.n == 200
        assert report.accuracy == pytest.approx(np.trace(np.asarray(report.confusion)) / 200)
        assert report.accuracy == pytest.approx((preds == labels).mean())

    def test_accepts_classes(self) -> None:
        report = evaluate_classifier([QualityClass.DAMAGED], ["damaged"])
        assert report.accuracy == 1.0

    def test_length_mismatch(self) -> None:
        with pytest.raises(LengthMismatch):
            evaluate_classifier([0, 1], [0])

    def test_dict_round_trip(self) -> None:
        report = evaluate_classifier([1, 1, 2], [0, 1, 2])
        data = report.to_dict()
        assert data["per_class_accuracy"]["handwritten"] is None
        assert ClassificationReport.from_dict(data) == report


class TestRunSummary:
    """Tests for mean and sample standard deviation."""

    def test_sample_std(self) -> None:
        summary = summarize_runs([1.0, 2.0, 3.0])
        assert summary.mean == pytest.approx(2.0)
        assert summary.std == pytest.approx(1.0)

    def test_format(self) -> None:
        assert RunSummary((0.9906,), 0.9906, 0.0066).format() == "99.06 ± 0.66%"
        assert RunSummary((2.0,), 2.0, 0.5).format(percent=False) == "2.00 ± 0.50"

    def test_too_few(self) -> None:
        with pytest.raises(TooFewRuns):
            summarize_runs([0.9])

    def test_dict_round_trip(self) -> None:
        summary = summarize_runs([0.5, 0.75])
        assert RunSummary.from_dict(summary.to_dict()) == summary
