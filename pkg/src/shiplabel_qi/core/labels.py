"""Quality classes and per-image ground-truth annotations."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import IntEnum
from typing import Any

from shiplabel_qi.core.errors import UnknownClass
from shiplabel_qi.core.raster import BoundingBox


class QualityClass(IntEnum):
    """Condition of a shipping-label image. Codes are fixed for file formats."""
    NORMAL = 0
    CONTAMINATED = 1
    UNREADABLE = 2
    HANDWRITTEN = 3
    DAMAGED = 4

    @classmethod
    def parse(cls, value: int | str | QualityClass) -> QualityClass:
        """Accept an integer code, a name ("damaged") or a member."""
        if isinstance(value, QualityClass):
            return value
        if isinstance(value, str):
            key = value.strip().upper()
            if key in cls.__members__:
                return cls[key]
            if key.isdigit():
                value = int(key)
            else:
                raise UnknownClass(f"Unknown quality class: {value!r}")
        try:
            return cls(int(value))
        except ValueError:
            raise UnknownClass(f"Unknown quality class: {value!r}") from None

    @property
    def label(self) -> str:
        """Lower-case display name."""
        return self.name.lower()


NUM_CLASSES = len(QualityClass)

# What the downstream pipeline should do with an image of each class
CLASS_ACTIONS: dict[QualityClass, str] = {
    QualityClass.NORMAL: "proceed",
    QualityClass.CONTAMINATED: "enhance",
    QualityClass.UNREADABLE: "reacquire",
    QualityClass.HANDWRITTEN: "recognize_handwriting",
    QualityClass.DAMAGED: "inspect",
}


@dataclass(frozen=True)
class Annotation:
    """
    Ground truth for one label image.

    The address lines are kept so that degradations can re-render the
    receiver block; they are not part of the manifest format.
    """
    image_path: str
    quality: QualityClass
    barcode_box: BoundingBox
    address_box: BoundingBox
    seed: int
    address_lines: tuple[str, ...] = field(default=(), compare=False)

    def check_fits(self, width: int, height: int) -> None:
        """Raise OutOfBounds if either box leaves the image."""
        self.barcode_box.check_fits(width, height)
        self.address_box.check_fits(width, height)

    def with_boxes(
        self, barcode_box: BoundingBox, address_box: BoundingBox
    ) -> Annotation:
        return Annotation(
            image_path=self.image_path,
            quality=self.quality,
            barcode_box=barcode_box,
            address_box=address_box,
            seed=self.seed,
            address_lines=self.address_lines,
        )

    def to_dict(self) -> dict[str, Any]:
        """Manifest line representation."""
        return {
            "path": self.image_path,
            "class": int(self.quality),
            "barcode": self.barcode_box.to_list(),
            "address": self.address_box.to_list(),
            "seed": self.seed,
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> Annotation:
        return cls(
            image_path=str(data["path"]),
            quality=QualityClass.parse(data["class"]),
            barcode_box=BoundingBox.from_list(data["barcode"]),
            address_box=BoundingBox.from_list(data["address"]),
            seed=int(data["seed"]),
        )
