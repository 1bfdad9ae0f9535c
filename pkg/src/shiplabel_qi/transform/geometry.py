"""Geometric transforms: crop, letterbox resize, rotation/flip augmentation."""

from __future__ import annotations

from enum import Enum

import numpy as np
from scipy import ndimage

from shiplabel_qi.core.raster import BoundingBox, Raster

# Label background is white
DEFAULT_PAD_VALUE = 255


def crop(raster: Raster, box: BoundingBox) -> Raster:
    """Copy the samples inside box (no interpolation)."""
    box.check_fits(raster.width, raster.height)
    return Raster(raster.pixels[box.y:box.y2, box.x:box.x2, :].copy())


def letterbox_geometry(
    width: int, height: int, target_w: int, target_h: int
) -> tuple[float, BoundingBox]:
    """
    Scale factor and content placement for a letterbox resize.

    Returns (s, content_box) with s = min(target_w/width, target_h/height)
    and the scaled content centered in the target canvas.
    """
    s = min(target_w / width, target_h / height)
    cw = min(target_w, max(1, int(np.floor(width * s + 0.5))))
    ch = min(target_h, max(1, int(np.floor(height * s + 0.5))))
    return s, BoundingBox((target_w - cw) // 2, (target_h - ch) // 2, cw, ch)


def resize_bilinear(raster: Raster, out_w: int, out_h: int) -> Raster:
    """Resample to exactly out_w x out_h with pixel-center bilinear interpolation."""
    if (out_w, out_h) == raster.size:
        return Raster(raster.pixels.copy())
    sx = raster.width / out_w
    sy = raster.height / out_h
    ys = (np.arange(out_h) + 0.5) * sy - 0.5
    xs = (np.arange(out_w) + 0.5) * sx - 0.5
    ys = np.clip(ys, 0, raster.height - 1)
    xs = np.clip(xs, 0, raster.width - 1)
    grid_y, grid_x = np.meshgrid(ys, xs, indexing="ij")
    out = np.empty((out_h, out_w, raster.channels), dtype=np.uint8)
    for c in range(raster.channels):
        plane = raster.pixels[:, :, c].astype(np.float64)
        sampled = ndimage.map_coordinates(plane, [grid_y, grid_x], order=1, mode="nearest")
        out[:, :, c] = np.clip(np.floor(sampled + 0.5), 0, 255).astype(np.uint8)
    return Raster(out)


def resize_nearest(raster: Raster, out_w: int, out_h: int) -> Raster:
    """Nearest-neighbour resample, for masks and pixel-art upscales."""
    rows = np.minimum((np.arange(out_h) * raster.height) // out_h, raster.height - 1)
    cols = np.minimum((np.arange(out_w) * raster.width) // out_w, raster.width - 1)
    return Raster(raster.pixels[rows][:, cols].copy())


def resize_letterbox(
    raster: Raster,
    target_w: int,
    target_h: int,
    pad_value: int = DEFAULT_PAD_VALUE,
) -> Raster:
    """
    Aspect-preserving resize into a fixed canvas.

    Content is scaled by s = min(target_w/w, target_h/h) with bilinear
    interpolation, centered, and the remaining area filled with pad_value.
    """
    if target_w < 1 or target_h < 1:
        raise ValueError(f"Letterbox target must be >= 1, got {target_w}x{target_h}")
    _, box = letterbox_geometry(raster.width, raster.height, target_w, target_h)
    content = resize_bilinear(raster, box.w, box.h)
    canvas = np.full((target_h, target_w, raster.channels), pad_value, dtype=np.uint8)
    canvas[box.y:box.y2, box.x:box.x2, :] = content.pixels
    return Raster(canvas)


def pad_to(raster: Raster, width: int, height: int, pad_value: int = DEFAULT_PAD_VALUE) -> Raster:
    """Place the raster at the top-left of a larger pad_value canvas (clips if smaller)."""
    canvas = np.full((height, width, raster.channels), pad_value, dtype=np.uint8)
    h = min(height, raster.height)
    w = min(width, raster.width)
    canvas[:h, :w, :] = raster.pixels[:h, :w, :]
    return Raster(canvas)


class AugmentOp(str, Enum):
    """Exact pixel permutations used for data augmentation."""
    ROT90 = "rot90"     # clockwise
    ROT180 = "rot180"
    ROT270 = "rot270"   # clockwise, i.e. 90 counter-clockwise
    FLIP_H = "flip_h"   # mirror left-right
    FLIP_V = "flip_v"   # mirror top-bottom


def augment(raster: Raster, op: AugmentOp | str) -> Raster:
    """Rotate or flip; dimensions swap for rot90/rot270."""
    op = AugmentOp(op)
    px = raster.pixels
    if op is AugmentOp.ROT90:
        out = np.rot90(px, k=-1, axes=(0, 1))
    elif op is AugmentOp.ROT180:
        out = np.rot90(px, k=2, axes=(0, 1))
    elif op is AugmentOp.ROT270:
        out = np.rot90(px, k=1, axes=(0, 1))
    elif op is AugmentOp.FLIP_H:
        out = px[:, ::-1, :]
    else:
        out = px[::-1, :, :]
    return Raster(np.ascontiguousarray(out))


def augment_box(box: BoundingBox, width: int, height: int, op: AugmentOp | str) -> BoundingBox:
    """Map a box on a width x height image through the same permutation as augment."""
    op = AugmentOp(op)
    if op is AugmentOp.ROT90:
        return BoundingBox(height - box.y2, box.x, box.h, box.w)
    if op is AugmentOp.ROT180:
        return BoundingBox(width - box.x2, height - box.y2, box.w, box.h)
    if op is AugmentOp.ROT270:
        return BoundingBox(box.y, width - box.x2, box.h, box.w)
    if op is AugmentOp.FLIP_H:
        return BoundingBox(width - box.x2, box.y, box.w, box.h)
    return BoundingBox(box.x, height - box.y2, box.w, box.h)
