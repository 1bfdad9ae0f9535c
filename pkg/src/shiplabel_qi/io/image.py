"""Optional Pillow adapter: PNG/JPEG/... files to and from Raster.

The core codec only speaks PNM. This adapter lets real photographs of
labels enter the pipeline:

    from shiplabel_qi.io.image import from_image_file
    raster = from_image_file("label.jpg")
"""

from pathlib import Path
from typing import Union

import numpy as np

from shiplabel_qi.core.raster import Raster

try:
    from PIL import Image
    HAS_PIL = True
except ImportError:
    HAS_PIL = False


def _check_pil() -> None:
    """Raise ImportError if PIL is not available."""
    if not HAS_PIL:
        raise ImportError(
            "Pillow is required for non-PNM images. "
            "Install with: uv pip install shiplabel-qi[image]"
        )


def from_image_file(path: Union[str, Path]) -> Raster:
    """
    Read any Pillow-supported image as a Raster.

    Grayscale modes stay single-channel; everything else (palette, RGBA,
    CMYK) is converted to RGB. Alpha is dropped.
    """
    _check_pil()
    with Image.open(Path(path)) as img:
        if img.mode in ("L", "1", "I;16", "I", "F"):
            img = img.convert("L")
        else:
            img = img.convert("RGB")
        return Raster.from_array(np.asarray(img))


def to_image_file(raster: Raster, path: Union[str, Path]) -> None:
    """Write a Raster in the format implied by the file extension."""
    _check_pil()
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    if raster.channels == 1:
        img = Image.fromarray(raster.plane())
    else:
        img = Image.fromarray(raster.pixels)
    img.save(path)
