"""Seeded stratified k-fold plans."""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass
from typing import Any

from shiplabel_qi.core.errors import ConfigError, InsufficientData
from shiplabel_qi.core.labels import QualityClass
from shiplabel_qi.core.rng import Xoshiro256
from shiplabel_qi.synth.dataset import DatasetManifest


@dataclass(frozen=True)
class FoldPlan:
    """
    Test folds of a k-fold cross-validation.

    Folds are disjoint. Without a quota they cover the whole dataset; with a
    per-class quota q every fold holds exactly q images of each class and the
    remaining images are train_only, used for training in every fold.
    """
    folds: tuple[tuple[int, ...], ...]
    seed: int
    size: int
    quota: int | None = None
    train_only: tuple[int, ...] = ()

    @property
    def k(self) -> int:
        return len(self.folds)

    def __len__(self) -> int:
        return self.k

    def test_indices(self, fold: int) -> list[int]:
        return list(self.folds[fold])

    def train_indices(self, fold: int) -> list[int]:
        """Every index outside the test fold, ascending."""
        held_out = set(self.folds[fold])
        return [i for i in range(self.size) if i not in held_out]

    def to_dict(self) -> dict[str, Any]:
        return {
            "k": self.k,
            "seed": self.seed,
            "size": self.size,
            "quota": self.quota,
            "folds": [list(f) for f in self.folds],
            "train_only": list(self.train_only),
        }


def _labels(data: DatasetManifest | Sequence[QualityClass | int]) -> list[int]:
    if isinstance(data, DatasetManifest):
        return [int(c) for c in data.labels]
    return [int(QualityClass.parse(c)) for c in data]


def kfold_split(
    data: DatasetManifest | Sequence[QualityClass | int],
    k: int,
    seed: int,
    per_class_quota: int | None = None,
) -> FoldPlan:
    """
    Stratified seeded k-fold split.

    Each class's indices are shuffled by a stream forked from seed per
    class code. Without a quota they are dealt round-robin across folds,
    continuing from where the previous class stopped so fold sizes differ
    by at most one. With a quota, the first k*q shuffled images of each
    class fill the folds, q per fold.

    Raises:
        InsufficientData: fewer than k images, or fewer than k*q of a class
    """
    if k < 2:
        raise ConfigError(f"k must be >= 2, got {k}")
    if per_class_quota is not None and per_class_quota < 1:
        raise ConfigError(f"per_class_quota must be >= 1, got {per_class_quota}")
    labels = _labels(data)
    n = len(labels)
    if n < k:
        raise InsufficientData(f"Cannot split {n} images into {k} folds")

    rng = Xoshiro256(seed)
    folds: list[list[int]] = [[] for _ in range(k)]
    train_only: list[int] = []
    cursor = 0
    for cls in QualityClass:
        members = [i for i, label in enumerate(labels) if label == int(cls)]
        if per_class_quota is not None and len(members) < k * per_class_quota:
            raise InsufficientData(
                f"Class {cls.label} has {len(members)} images, "
                f"{k * per_class_quota} needed for {k} folds of {per_class_quota}"
            )
        rng.fork(int(cls)).shuffle(members)
        if per_class_quota is None:
            for index in members:
                folds[cursor % k].append(index)
                cursor += 1
        else:
            for f in range(k):
                folds[f].extend(members[f * per_class_quota:(f + 1) * per_class_quota])
            train_only.extend(members[k * per_class_quota:])

    return FoldPlan(
        folds=tuple(tuple(sorted(f)) for f in folds),
        seed=seed,
        size=n,
        quota=per_class_quota,
        train_only=tuple(sorted(train_only)),
    )


def holdout_split(
    indices: Sequence[int],
    labels: Sequence[QualityClass | int],
    fraction: float,
    seed: int,
) -> tuple[list[int], list[int]]:
    """
    Stratified (train, validation) split of indices.

    labels[i] is the class of indices[i]. Each class gives floor(fraction *
    count) images to validation, at least one when it has two or more, and
    none when fraction is 0. Both lists come back ascending.
    """
    if not 0.0 <= fraction < 1.0:
        raise ConfigError(f"Validation fraction must lie in [0, 1), got {fraction}")
    if len(indices) != len(labels):
        raise InsufficientData(f"{len(indices)} indices but {len(labels)} labels")
    rng = Xoshiro256(seed)
    validation: list[int] = []
    for cls in QualityClass:
        members = [idx for idx, label in zip(indices, labels) if int(label) == int(cls)]
        take = int(len(members) * fraction)
        if fraction > 0 and take == 0 and len(members) >= 2:
            take = 1
        rng.fork(int(cls)).shuffle(members)
        validation.extend(members[:take])
    held = set(validation)
    return sorted(i for i in indices if i not in held), sorted(validation)
