"""Raster - 8-bit grayscale or RGB pixel grid, the universal image carrier."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any

import numpy as np

from shiplabel_qi.core.errors import OutOfBounds, RasterError


@dataclass(frozen=True, eq=False)
class Raster:
    """
    An immutable-by-convention 8-bit image.

    Samples are held in a numpy array of shape (height, width, channels)
    with dtype uint8, which is exactly the row-major layout of the PNM
    body. Operations in this package never modify a raster in place; they
    return new rasters.
    """
    pixels: np.ndarray

    def __post_init__(self) -> None:
        """Validate dtype, rank and channel count."""
        px = self.pixels
        if not isinstance(px, np.ndarray) or px.dtype != np.uint8:
            raise RasterError("Raster pixels must be a uint8 numpy array")
        if px.ndim != 3:
            raise RasterError(f"Raster pixels must be (h, w, c), got shape {px.shape}")
        h, w, c = px.shape
        if w < 1 or h < 1:
            raise RasterError(f"Raster dimensions must be >= 1, got {w}x{h}")
        if c not in (1, 3):
            raise RasterError(f"Raster channels must be 1 or 3, got {c}")

    @classmethod
    def from_array(cls, array: Any) -> Raster:
        """Build a raster from a 2-D (gray) or 3-D array-like, copying it."""
        arr = np.asarray(array)
        if arr.ndim == 2:
            arr = arr[:, :, np.newaxis]
        if arr.dtype != np.uint8:
            if np.issubdtype(arr.dtype, np.floating):
                arr = np.clip(np.floor(arr + 0.5), 0, 255)
            arr = arr.astype(np.uint8)
        return cls(np.ascontiguousarray(arr).copy())

    @classmethod
    def from_bytes(cls, width: int, height: int, channels: int, data: bytes) -> Raster:
        """Build a raster from a row-major sample buffer."""
        expected = width * height * channels
        if len(data) != expected:
            raise RasterError(f"Expected {expected} samples, got {len(data)}")
        arr = np.frombuffer(data, dtype=np.uint8).reshape(height, width, channels)
        return cls(arr.copy())

    @classmethod
    def blank(cls, width: int, height: int, channels: int = 1, value: int = 255) -> Raster:
        """Create a raster filled with a single value."""
        return cls(np.full((height, width, channels), value, dtype=np.uint8))

    @property
    def width(self) -> int:
        return int(self.pixels.shape[1])

    @property
    def height(self) -> int:
        return int(self.pixels.shape[0])

    @property
    def channels(self) -> int:
        return int(self.pixels.shape[2])

    @property
    def size(self) -> tuple[int, int]:
        """(width, height) of the image."""
        return self.width, self.height

    @property
    def is_grayscale(self) -> bool:
        return self.channels == 1

    @property
    def data(self) -> bytes:
        """Row-major samples, length width*height*channels."""
        return self.pixels.tobytes()

    def plane(self) -> np.ndarray:
        """Return the 2-D sample array of a grayscale raster."""
        if self.channels != 1:
            raise RasterError("plane() requires a single-channel raster")
        return self.pixels[:, :, 0]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Raster):
            return NotImplemented
        return self.pixels.shape == other.pixels.shape and bool(
            np.array_equal(self.pixels, other.pixels)
        )

    def __hash__(self) -> int:
        return hash((self.pixels.shape, self.pixels.tobytes()))

    def __repr__(self) -> str:
        return f"Raster({self.width}x{self.height}x{self.channels})"


@dataclass(frozen=True, slots=True)
class BoundingBox:
    """Axis-aligned pixel box: left, top, width, height."""
    x: int
    y: int
    w: int
    h: int

    def __post_init__(self) -> None:
        if self.x < 0 or self.y < 0:
            raise RasterError(f"Box origin must be >= 0, got ({self.x}, {self.y})")
        if self.w < 1 or self.h < 1:
            raise RasterError(f"Box size must be >= 1, got {self.w}x{self.h}")

    @property
    def x2(self) -> int:
        """Exclusive right edge."""
        return self.x + self.w

    @property
    def y2(self) -> int:
        """Exclusive bottom edge."""
        return self.y + self.h

    @property
    def area(self) -> int:
        return self.w * self.h

    @property
    def center(self) -> tuple[float, float]:
        return self.x + self.w / 2, self.y + self.h / 2

    def fits(self, width: int, height: int) -> bool:
        """True if the box lies inside a width x height image."""
        return self.x2 <= width and self.y2 <= height

    def check_fits(self, width: int, height: int) -> None:
        """Raise OutOfBounds unless the box lies inside the image."""
        if not self.fits(width, height):
            raise OutOfBounds(f"{self} does not fit in {width}x{height}")

    def intersection(self, other: BoundingBox) -> BoundingBox | None:
        """Overlapping box, or None when the boxes are disjoint."""
        x1 = max(self.x, other.x)
        y1 = max(self.y, other.y)
        x2 = min(self.x2, other.x2)
        y2 = min(self.y2, other.y2)
        if x2 <= x1 or y2 <= y1:
            return None
        return BoundingBox(x1, y1, x2 - x1, y2 - y1)

    def overlaps(self, other: BoundingBox) -> bool:
        return self.intersection(other) is not None

    def expand(self, margin: int, width: int, height: int) -> BoundingBox:
        """Grow by margin on every side, clipped to the image."""
        x1 = max(0, self.x - margin)
        y1 = max(0, self.y - margin)
        x2 = min(width, self.x2 + margin)
        y2 = min(height, self.y2 + margin)
        return BoundingBox(x1, y1, x2 - x1, y2 - y1)

    def translate(self, dx: int, dy: int) -> BoundingBox:
        return BoundingBox(self.x + dx, self.y + dy, self.w, self.h)

    def to_list(self) -> list[int]:
        return [self.x, self.y, self.w, self.h]

    @classmethod
    def from_list(cls, values: list[int] | tuple[int, ...]) -> BoundingBox:
        if len(values) != 4:
            raise RasterError(f"Box needs 4 values [x, y, w, h], got {list(values)}")
        x, y, w, h = (int(v) for v in values)
        return cls(x, y, w, h)

    def __str__(self) -> str:
        return f"Box(x={self.x}, y={self.y}, w={self.w}, h={self.h})"
