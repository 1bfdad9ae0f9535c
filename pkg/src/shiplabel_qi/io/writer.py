"""Save rasters to disk."""

from pathlib import Path
from typing import Union

from shiplabel_qi.codec.pnm import write_pnm
from shiplabel_qi.core.raster import Raster
from shiplabel_qi.io.reader import PNM_EXTENSIONS


def save(raster: Raster, path: Union[str, Path]) -> None:
    """
    Save a raster to disk.

    PNM extensions use the built-in codec; other extensions go through the
    optional Pillow adapter.
    """
    path = Path(path)
    if path.suffix.lower() in PNM_EXTENSIONS:
        save_pnm(raster, path)
        return
    from shiplabel_qi.io.image import to_image_file
    to_image_file(raster, path)


def save_pnm(raster: Raster, path: Union[str, Path]) -> None:
    """Write a raster as binary PNM."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "wb") as f:
        f.write(write_pnm(raster))
