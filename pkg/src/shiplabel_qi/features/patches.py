"""High-feature patch selection by per-tile FAST corner counts.

The image is padded right and bottom with white to a whole number of tiles,
corners are detected once on the padded gray image and counted per tile, and
the n_p tiles with the most corners are cropped at original scale.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any

import numpy as np

from shiplabel_qi.core.errors import ConfigError
from shiplabel_qi.core.raster import BoundingBox, Raster
from shiplabel_qi.core.serial import check_keys
from shiplabel_qi.features.fast import CornerSet, detect_corners
from shiplabel_qi.transform.color import to_grayscale
from shiplabel_qi.transform.geometry import crop, pad_to

PAD_VALUE = 255


@dataclass(frozen=True)
class PatchSelectionConfig:
    """
    FAST threshold, patch size and patch count.

    Example:
        >>> PatchSelectionConfig().with_patch_size(128, 128).with_count(4)
    """
    t: int = 50
    patch_w: int = 256
    patch_h: int = 256
    n_p: int = 3

    def __post_init__(self) -> None:
        if not 1 <= self.t <= 255:
            raise ConfigError(f"t must lie in [1, 255], got {self.t}")
        if self.n_p < 1:
            raise ConfigError(f"n_p must be >= 1, got {self.n_p}")
        if self.patch_w < 16 or self.patch_h < 16:
            raise ConfigError(
                f"Patch size must be >= 16x16, got {self.patch_w}x{self.patch_h}"
            )

    def with_threshold(self, t: int) -> PatchSelectionConfig:
        return PatchSelectionConfig(t, self.patch_w, self.patch_h, self.n_p)

    def with_patch_size(self, patch_w: int, patch_h: int) -> PatchSelectionConfig:
        return PatchSelectionConfig(self.t, patch_w, patch_h, self.n_p)

    def with_count(self, n_p: int) -> PatchSelectionConfig:
        return PatchSelectionConfig(self.t, self.patch_w, self.patch_h, n_p)

    def to_dict(self) -> dict[str, Any]:
        return {"t": self.t, "patch_w": self.patch_w, "patch_h": self.patch_h, "n_p": self.n_p}

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> PatchSelectionConfig:
        check_keys(cls, data)
        return cls(**{k: int(v) for k, v in data.items()})


@dataclass(frozen=True)
class PatchSet:
    """
    Selected patches in descending corner-count order.

    tile_counts and tile_origins cover every grid tile in row-major order;
    selected holds the tile indices the patches were cropped from. Images
    smaller than one patch give a single tile whose padded copy is repeated
    n_p times.
    """
    patches: tuple[Raster, ...]
    tile_counts: tuple[int, ...]
    tile_origins: tuple[tuple[int, int], ...]
    selected: tuple[int, ...]
    grid: tuple[int, int]  # (columns, rows)

    def __len__(self) -> int:
        return len(self.patches)

    @property
    def selected_counts(self) -> list[int]:
        return [self.tile_counts[i] for i in self.selected]

    @property
    def selected_origins(self) -> list[tuple[int, int]]:
        return [self.tile_origins[i] for i in self.selected]


def tile_grid(width: int, height: int, patch_w: int, patch_h: int) -> tuple[int, int]:
    """(columns, rows) of the grid covering a width x height image."""
    return -(-width // patch_w), -(-height // patch_h)


def count_per_tile(
    corners: CornerSet, columns: int, rows: int, patch_w: int, patch_h: int
) -> np.ndarray:
    """Corner count of every tile in row-major tile order."""
    index = (corners.ys // patch_h) * columns + corners.xs // patch_w
    return np.bincount(index, minlength=columns * rows)[: columns * rows]


def rank_tiles(counts: np.ndarray, n: int) -> list[int]:
    """Indices of the n largest counts; ties go to the lower tile index."""
    order = sorted(range(len(counts)), key=lambda i: (-int(counts[i]), i))
    return order[:n]


def select_patches(
    image: Raster, config: PatchSelectionConfig | None = None
) -> PatchSet:
    """
    Crop the n_p tiles with the most FAST corners.

    Patches are exact pixel copies at original scale. If the image is smaller
    than the patch in either dimension, it is copied top-left into a white
    patch canvas (clipped when one side is larger) and the canvas is repeated
    n_p times.
    """
    config = config or PatchSelectionConfig()
    pw, ph, n_p = config.patch_w, config.patch_h, config.n_p

    if image.width < pw or image.height < ph:
        canvas = pad_to(image, pw, ph, PAD_VALUE)
        corners = detect_corners(to_grayscale(canvas), config.t)
        return PatchSet(
            patches=(canvas,) * n_p,
            tile_counts=(len(corners),),
            tile_origins=((0, 0),),
            selected=(0,) * n_p,
            grid=(1, 1),
        )

    columns, rows = tile_grid(image.width, image.height, pw, ph)
    padded = pad_to(image, columns * pw, rows * ph, PAD_VALUE)
    corners = detect_corners(to_grayscale(padded), config.t)
    counts = count_per_tile(corners, columns, rows, pw, ph)
    origins = tuple(((i % columns) * pw, (i // columns) * ph) for i in range(columns * rows))

    # Fewer tiles than n_p: cycle through the ranking
    ranking = rank_tiles(counts, columns * rows)
    selected = tuple(ranking[i % len(ranking)] for i in range(n_p))
    patches = tuple(crop(padded, BoundingBox(*origins[i], pw, ph)) for i in selected)
    return PatchSet(
        patches=patches,
        tile_counts=tuple(int(c) for c in counts),
        tile_origins=origins,
        selected=selected,
        grid=(columns, rows),
    )
