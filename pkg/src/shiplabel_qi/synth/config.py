"""Generation config for synthetic shipping-label datasets."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

from shiplabel_qi.core.errors import ConfigError
from shiplabel_qi.core.labels import QualityClass
from shiplabel_qi.core.serial import check_keys, stable_hash

# Smallest label that always fits an address block and a barcode
MIN_LABEL_W = 320
MIN_LABEL_H = 240

LAYOUTS = ("stacked", "barcode_first", "footer_band", "framed")

# Generated-set class counts of the manually annotated reference dataset
TABLE_ONE_COUNTS: dict[QualityClass, int] = {
    QualityClass.NORMAL: 1283,
    QualityClass.CONTAMINATED: 1054,
    QualityClass.UNREADABLE: 904,
    QualityClass.HANDWRITTEN: 988,
    QualityClass.DAMAGED: 1077,
}


def _default_intensities() -> dict[QualityClass, tuple[float, float]]:
    return {
        QualityClass.NORMAL: (0.0, 0.0),
        QualityClass.CONTAMINATED: (0.3, 1.0),
        QualityClass.UNREADABLE: (0.3, 1.0),
        QualityClass.HANDWRITTEN: (0.3, 1.0),
        QualityClass.DAMAGED: (0.3, 1.0),
    }


@dataclass
class GenConfig:
    """
    Parameters for build_dataset and generate_label.

    Example:
        >>> config = (GenConfig()
        ...     .with_count(100)
        ...     .with_seed(42)
        ...     .with_size_range(384, 288, 640, 480))
    """
    per_class_count: int = 100
    per_class_overrides: dict[QualityClass, int] = field(default_factory=dict)
    image_size_range: tuple[int, int, int, int] = (384, 288, 640, 480)
    master_seed: int = 42

    # Layout
    font_scale: int = 2          # receiver block; sender text uses half, min 1
    margin: int = 12
    layouts: tuple[str, ...] = LAYOUTS
    barcode_height: int = 48
    max_module_px: int = 3

    # Degradation intensity ranges, drawn uniformly per image
    intensity_ranges: dict[QualityClass, tuple[float, float]] = field(
        default_factory=_default_intensities
    )

    def __post_init__(self) -> None:
        self.validate()

    def validate(self) -> None:
        """Raise ConfigError on an invalid configuration."""
        if self.per_class_count < 0:
            raise ConfigError(f"per_class_count must be >= 0, got {self.per_class_count}")
        for cls, count in self.per_class_overrides.items():
            if count < 0:
                raise ConfigError(f"Override for {QualityClass.parse(cls).label} must be >= 0")
        min_w, min_h, max_w, max_h = self.image_size_range
        if min_w < MIN_LABEL_W or min_h < MIN_LABEL_H:
            raise ConfigError(
                f"Minimum label size is {MIN_LABEL_W}x{MIN_LABEL_H}, got {min_w}x{min_h}"
            )
        if max_w < min_w or max_h < min_h:
            raise ConfigError(f"Invalid size range {self.image_size_range}")
        if self.font_scale < 1:
            raise ConfigError(f"font_scale must be >= 1, got {self.font_scale}")
        if self.margin < 0:
            raise ConfigError(f"margin must be >= 0, got {self.margin}")
        if not self.layouts or any(name not in LAYOUTS for name in self.layouts):
            raise ConfigError(f"layouts must be a non-empty subset of {LAYOUTS}")
        if self.barcode_height < 8 or self.max_module_px < 1:
            raise ConfigError("barcode_height must be >= 8 and max_module_px >= 1")
        for cls, (lo, hi) in self.intensity_ranges.items():
            if not 0.0 <= lo <= hi <= 1.0:
                raise ConfigError(
                    f"Intensity range for {QualityClass.parse(cls).label} must lie in [0, 1]"
                )

    # Fluent builder methods
    def with_count(self, count: int) -> GenConfig:
        """Set the number of images per class."""
        self.per_class_count = count
        self.validate()
        return self

    def with_overrides(self, counts: dict[QualityClass, int]) -> GenConfig:
        """Set explicit per-class counts (classes not listed use per_class_count)."""
        self.per_class_overrides = {QualityClass.parse(k): v for k, v in counts.items()}
        self.validate()
        return self

    def with_seed(self, seed: int) -> GenConfig:
        self.master_seed = seed
        return self

    def with_size_range(self, min_w: int, min_h: int, max_w: int, max_h: int) -> GenConfig:
        self.image_size_range = (min_w, min_h, max_w, max_h)
        self.validate()
        return self

    def with_intensity(self, cls: QualityClass, low: float, high: float) -> GenConfig:
        self.intensity_ranges[QualityClass.parse(cls)] = (low, high)
        self.validate()
        return self

    @classmethod
    def table_one(cls, master_seed: int = 42) -> GenConfig:
        """Class counts of the reference generated dataset (5306 images)."""
        return cls(master_seed=master_seed).with_overrides(dict(TABLE_ONE_COUNTS))

    def count_for(self, quality: QualityClass) -> int:
        return self.per_class_overrides.get(quality, self.per_class_count)

    @property
    def total_count(self) -> int:
        return sum(self.count_for(c) for c in QualityClass)

    def intensity_range(self, quality: QualityClass) -> tuple[float, float]:
        return self.intensity_ranges.get(quality, (0.0, 0.0))

    def config_hash(self) -> str:
        return stable_hash(self.to_dict())

    def to_dict(self) -> dict[str, Any]:
        """Serialize for the dataset config echo."""
        return {
            "per_class_count": self.per_class_count,
            "per_class_overrides": {
                str(int(k)): v for k, v in sorted(self.per_class_overrides.items())
            },
            "image_size_range": list(self.image_size_range),
            "master_seed": self.master_seed,
            "font_scale": self.font_scale,
            "margin": self.margin,
            "layouts": list(self.layouts),
            "barcode_height": self.barcode_height,
            "max_module_px": self.max_module_px,
            "intensity_ranges": {
                str(int(k)): list(v) for k, v in sorted(self.intensity_ranges.items())
            },
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> GenConfig:
        """Deserialize, rejecting unknown keys."""
        check_keys(cls, data)
        defaults = cls()
        intensities = _default_intensities()
        for k, v in data.get("intensity_ranges", {}).items():
            intensities[QualityClass.parse(k)] = (float(v[0]), float(v[1]))
        size_range = data.get("image_size_range", defaults.image_size_range)
        if len(size_range) != 4:
            raise ConfigError("image_size_range needs [min_w, min_h, max_w, max_h]")
        return cls(
            per_class_count=int(data.get("per_class_count", defaults.per_class_count)),
            per_class_overrides={
                QualityClass.parse(k): int(v)
                for k, v in data.get("per_class_overrides", {}).items()
            },
            image_size_range=(
                int(size_range[0]), int(size_range[1]), int(size_range[2]), int(size_range[3])
            ),
            master_seed=int(data.get("master_seed", defaults.master_seed)),
            font_scale=int(data.get("font_scale", defaults.font_scale)),
            margin=int(data.get("margin", defaults.margin)),
            layouts=tuple(data.get("layouts", defaults.layouts)),
            barcode_height=int(data.get("barcode_height", defaults.barcode_height)),
            max_module_px=int(data.get("max_module_px", defaults.max_module_px)),
            intensity_ranges=intensities,
        )
