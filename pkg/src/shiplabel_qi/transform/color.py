"""Color conversion."""

import numpy as np

from shiplabel_qi.core.raster import Raster

# BT.601 luma weights, in thousandths so rounding stays exact in integers
_LUMA_WEIGHTS = np.array([299, 587, 114], dtype=np.int64)


def to_grayscale(raster: Raster) -> Raster:
    """
    Convert to a single channel: round(0.299 R + 0.587 G + 0.114 B).

    Rounding is half-up. Grayscale input is returned unchanged.
    """
    if raster.channels == 1:
        return raster
    weighted = raster.pixels.astype(np.int64) @ _LUMA_WEIGHTS
    gray = (weighted + 500) // 1000
    return Raster(gray.astype(np.uint8)[:, :, np.newaxis])


def to_rgb(raster: Raster) -> Raster:
    """Replicate a grayscale raster into three channels."""
    if raster.channels == 3:
        return raster
    return Raster(np.repeat(raster.pixels, 3, axis=2))
