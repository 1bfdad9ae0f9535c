"""Load rasters from disk."""

from pathlib import Path
from typing import Union

from shiplabel_qi.codec.pnm import read_pnm
from shiplabel_qi.core.raster import Raster

# File extensions handled by the built-in codec
PNM_EXTENSIONS = {".pnm", ".pgm", ".ppm"}


def load(path: Union[str, Path]) -> Raster:
    """
    Load an image file as a Raster.

    Supports:
    - .pnm, .pgm, .ppm - binary PNM, decoded by the built-in codec
    - anything else - through the optional Pillow adapter (PNG, JPEG, ...)
    """
    path = Path(path)
    if path.suffix.lower() in PNM_EXTENSIONS:
        return load_pnm(path)
    from shiplabel_qi.io.image import from_image_file
    return from_image_file(path)


def load_pnm(path: Union[str, Path]) -> Raster:
    """Load a binary PNM file."""
    return read_pnm(Path(path).read_bytes())
