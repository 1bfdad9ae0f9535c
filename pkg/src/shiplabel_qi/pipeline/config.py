"""Pipeline configuration: paths and every stage's settings in one JSON file."""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Union

from shiplabel_qi.core.errors import ConfigError, IoFailure
from shiplabel_qi.core.serial import check_keys
from shiplabel_qi.detect.roi import DETECTORS
from shiplabel_qi.features.patches import PatchSelectionConfig
from shiplabel_qi.fusion.config import FusionConfig
from shiplabel_qi.nn.extractor import Branch
from shiplabel_qi.nn.train import TrainConfig
from shiplabel_qi.synth.config import GenConfig

# Keys of PipelineConfig.train
TRAIN_KEYS = ("global", "address", "barcode", "fast_patch", "fusion")


def _default_train() -> dict[str, TrainConfig]:
    configs = {key: TrainConfig() for key in TRAIN_KEYS}
    configs["fusion"] = TrainConfig(epochs=50)
    return configs


def branch_key(branch: Branch) -> str:
    return Branch(branch).label


@dataclass(frozen=True)
class EvalConfig:
    """
    Cross-validation settings.

    quota is the number of test images per class in every fold (None for a
    plain stratified partition). validation_fraction of each training fold
    is held out to weight the branch votes.
    """
    k: int = 5
    seed: int = 0
    quota: int | None = None
    validation_fraction: float = 0.1
    augment_minority: bool = False

    def __post_init__(self) -> None:
        if self.k < 2:
            raise ConfigError(f"k must be >= 2, got {self.k}")
        if self.quota is not None and self.quota < 1:
            raise ConfigError(f"quota must be >= 1, got {self.quota}")
        if not 0.0 <= self.validation_fraction < 1.0:
            raise ConfigError(
                f"validation_fraction must lie in [0, 1), got {self.validation_fraction}"
            )

    def to_dict(self) -> dict[str, Any]:
        return {
            "k": self.k,
            "seed": self.seed,
            "quota": self.quota,
            "validation_fraction": self.validation_fraction,
            "augment_minority": self.augment_minority,
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> EvalConfig:
        check_keys(cls, data)
        defaults = cls()
        quota = data.get("quota", defaults.quota)
        return cls(
            k=int(data.get("k", defaults.k)),
            seed=int(data.get("seed", defaults.seed)),
            quota=None if quota is None else int(quota),
            validation_fraction=float(data.get("validation_fraction", defaults.validation_fraction)),
            augment_minority=bool(data.get("augment_minority", defaults.augment_minority)),
        )


@dataclass
class PipelineConfig:
    """
    Everything a run needs. Unknown keys anywhere are rejected.

    Example:
        >>> config = PipelineConfig.load("pipeline.json").with_seed(42)
        >>> config.full_scale().fusion.concat_dim
        3584
    """
    dataset_dir: str = "data"
    weights_dir: str = "weights"
    reports_dir: str = "reports"
    gen: GenConfig = field(default_factory=GenConfig)
    patches: PatchSelectionConfig = field(default_factory=PatchSelectionConfig)
    train: dict[str, TrainConfig] = field(default_factory=_default_train)
    fusion: FusionConfig = field(default_factory=FusionConfig)
    detector: str = "classical"
    eval: EvalConfig = field(default_factory=EvalConfig)

    def __post_init__(self) -> None:
        self.validate()

    def validate(self) -> None:
        unknown = sorted(set(self.train) - set(TRAIN_KEYS))
        if unknown:
            raise ConfigError(f"Unknown train keys: {', '.join(unknown)}")
        for key in TRAIN_KEYS:
            self.train.setdefault(key, _default_train()[key])
        if self.detector not in DETECTORS:
            raise ConfigError(f"Unknown detector {self.detector!r}; choose from {sorted(DETECTORS)}")

    def train_config(self, branch: Branch | str) -> TrainConfig:
        key = branch if isinstance(branch, str) else branch_key(branch)
        return self.train[key]

    def with_seed(self, seed: int) -> PipelineConfig:
        """Reseed generation, training and fold assignment."""
        self.gen.with_seed(seed)
        self.train = {k: v.with_seed(seed) for k, v in self.train.items()}
        self.eval = replace(self.eval, seed=seed)
        return self

    def full_scale(self) -> PipelineConfig:
        """Switch feature dims to 2048/512 and hidden widths to 512/128."""
        self.fusion = FusionConfig.full_scale()
        return self

    def to_dict(self) -> dict[str, Any]:
        return {
            "dataset_dir": self.dataset_dir,
            "weights_dir": self.weights_dir,
            "reports_dir": self.reports_dir,
            "gen": self.gen.to_dict(),
            "patches": self.patches.to_dict(),
            "train": {k: v.to_dict() for k, v in self.train.items()},
            "fusion": self.fusion.to_dict(),
            "detector": self.detector,
            "eval": self.eval.to_dict(),
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> PipelineConfig:
        check_keys(cls, data)
        defaults = cls()
        train = _default_train()
        raw_train = data.get("train", {})
        if not isinstance(raw_train, dict):
            raise ConfigError("train must be an object keyed by branch")
        for key, value in raw_train.items():
            if key not in TRAIN_KEYS:
                raise ConfigError(f"Unknown train key {key!r}; expected one of {TRAIN_KEYS}")
            train[key] = TrainConfig.from_dict(value)
        return cls(
            dataset_dir=str(data.get("dataset_dir", defaults.dataset_dir)),
            weights_dir=str(data.get("weights_dir", defaults.weights_dir)),
            reports_dir=str(data.get("reports_dir", defaults.reports_dir)),
            gen=GenConfig.from_dict(data["gen"]) if "gen" in data else defaults.gen,
            patches=PatchSelectionConfig.from_dict(data["patches"]) if "patches" in data else defaults.patches,
            train=train,
            fusion=FusionConfig.from_dict(data["fusion"]) if "fusion" in data else defaults.fusion,
            detector=str(data.get("detector", defaults.detector)),
            eval=EvalConfig.from_dict(data["eval"]) if "eval" in data else defaults.eval,
        )

    @classmethod
    def load(cls, path: Union[str, Path]) -> PipelineConfig:
        """
        Raises:
            IoFailure: unreadable file
            ConfigError: invalid JSON or config
        """
        try:
            text = Path(path).read_text(encoding="utf-8")
        except OSError as e:
            raise IoFailure(f"Cannot read config {path}: {e}") from e
        try:
            data = json.loads(text)
        except ValueError as e:
            raise ConfigError(f"Config {path} is not valid JSON: {e}") from e
        return cls.from_dict(data)

    def save(self, path: Union[str, Path]) -> None:
        try:
            Path(path).write_text(json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n", encoding="utf-8")
        except OSError as e:
            raise IoFailure(f"Cannot write config {path}: {e}") from e
