"""FAST-9 corner detection.

A pixel is a corner when at least 9 contiguous pixels of the 16-pixel
Bresenham circle of radius 3 around it are all brighter than center + t or
all darker than center - t. The segment test is evaluated for every pixel at
once on stacked circle offsets.
"""

from __future__ import annotations

from collections.abc import Iterator
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view
from scipy import ndimage

from shiplabel_qi.core.errors import ConfigError, NotGrayscale
from shiplabel_qi.core.raster import Raster

RADIUS = 3
ARC_LENGTH = 9

# Circle offsets (dx, dy), clockwise from 12 o'clock
CIRCLE: tuple[tuple[int, int], ...] = (
    (0, -3), (1, -3), (2, -2), (3, -1),
    (3, 0), (3, 1), (2, 2), (1, 3),
    (0, 3), (-1, 3), (-2, 2), (-3, 1),
    (-3, 0), (-3, -1), (-2, -2), (-1, -3),
)


class Corner(NamedTuple):
    x: int
    y: int
    score: int


@dataclass(frozen=True)
class CornerSet:
    """Corners of one grayscale raster, in row-major order."""
    xs: np.ndarray
    ys: np.ndarray
    scores: np.ndarray
    threshold: int
    suppressed: bool

    def __len__(self) -> int:
        return int(self.xs.size)

    def __iter__(self) -> Iterator[Corner]:
        for x, y, s in zip(self.xs.tolist(), self.ys.tolist(), self.scores.tolist()):
            yield Corner(x, y, s)

    @property
    def count(self) -> int:
        return len(self)

    def as_set(self) -> set[tuple[int, int]]:
        return set(zip(self.xs.tolist(), self.ys.tolist()))

    @classmethod
    def empty(cls, threshold: int, suppressed: bool) -> CornerSet:
        none = np.zeros(0, dtype=np.int64)
        return cls(none, none.copy(), none.copy(), threshold, suppressed)


def _check_threshold(t: int) -> None:
    if not 1 <= t <= 255:
        raise ConfigError(f"FAST threshold must lie in [1, 255], got {t}")


def score_map(gray: np.ndarray) -> np.ndarray:
    """
    Segment-test score of every interior pixel.

    The score is the largest threshold at which the pixel is still a corner
    (max over 9-arcs of the smallest brighter/darker difference, minus 1);
    -1 marks pixels that are not a corner at any threshold. Border pixels
    within RADIUS of the edge are -1.
    """
    h, w = gray.shape
    out = np.full((h, w), -1, dtype=np.int32)
    if h <= 2 * RADIUS or w <= 2 * RADIUS:
        return out
    img = gray.astype(np.int32)
    center = img[RADIUS:h - RADIUS, RADIUS:w - RADIUS]
    ring = np.stack(
        [img[RADIUS + dy:h - RADIUS + dy, RADIUS + dx:w - RADIUS + dx] for dx, dy in CIRCLE]
    ) - center
    # Wrap the ring so every 9-arc is a contiguous window
    wrapped = np.concatenate([ring, ring[:ARC_LENGTH - 1]], axis=0)
    arcs = sliding_window_view(wrapped, ARC_LENGTH, axis=0)[:len(CIRCLE)]
    brighter = arcs.min(axis=-1).max(axis=0)
    darker = (-arcs.max(axis=-1)).max(axis=0)
    best = np.maximum(brighter, darker)
    out[RADIUS:h - RADIUS, RADIUS:w - RADIUS] = np.maximum(best - 1, -1)
    return out


def _nonmax_suppress(scores: np.ndarray, mask: np.ndarray) -> np.ndarray:
    """
    3x3 non-maximum suppression over corner scores.

    Equal-score neighbours are resolved in row-major order, so no two kept
    corners are 8-neighbours.
    """
    masked = np.where(mask, scores, -1)
    local_max = ndimage.maximum_filter(masked, size=3, mode="constant", cval=-1)
    candidates = mask & (masked == local_max)
    kept = np.zeros_like(mask)
    ys, xs = np.nonzero(candidates)
    h, w = mask.shape
    for y, x in zip(ys.tolist(), xs.tolist()):
        if kept[max(0, y - 1):min(h, y + 2), max(0, x - 1):min(w, x + 2)].any():
            continue
        kept[y, x] = True
    return kept


def detect_corners(gray: Raster, t: int = 50, nonmax: bool = True) -> CornerSet:
    """
    FAST-9 corners of a grayscale raster.

    Args:
        gray: single-channel raster
        t: intensity threshold in [1, 255]
        nonmax: apply 3x3 non-maximum suppression on the score

    Raises:
        NotGrayscale: gray has more than one channel
        ConfigError: t outside [1, 255]
    """
    if gray.channels != 1:
        raise NotGrayscale("detect_corners requires a single-channel raster")
    _check_threshold(t)
    scores = score_map(gray.plane())
    mask = scores >= t
    if nonmax and mask.any():
        mask = _nonmax_suppress(scores, mask)
    ys, xs = np.nonzero(mask)
    if xs.size == 0:
        return CornerSet.empty(t, nonmax)
    return CornerSet(
        xs=xs.astype(np.int64),
        ys=ys.astype(np.int64),
        scores=scores[ys, xs].astype(np.int64),
        threshold=t,
        suppressed=nonmax,
    )
