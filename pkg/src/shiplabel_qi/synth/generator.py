"""Generate one annotated synthetic label."""

from __future__ import annotations

from dataclasses import dataclass

from shiplabel_qi.core.labels import Annotation, QualityClass
from shiplabel_qi.core.raster import Raster
from shiplabel_qi.core.rng import Xoshiro256, derive_seed
from shiplabel_qi.synth.config import GenConfig
from shiplabel_qi.synth.degrade import degrade_label
from shiplabel_qi.synth.layout import LabelRender, render_label

# Sub-stream tags under an image seed
_LAYOUT_STREAM = 1
_DEGRADE_STREAM = 2
_INTENSITY_STREAM = 3


@dataclass(frozen=True)
class GeneratedLabel:
    """A generated image with its annotation and generation details."""
    raster: Raster
    annotation: Annotation
    clean: LabelRender
    intensity: float
    variant: str


def render_clean(seed: int, config: GenConfig) -> LabelRender:
    """The undegraded label for seed; identical for every quality class."""
    rng = Xoshiro256(seed).fork(_LAYOUT_STREAM)
    min_w, min_h, max_w, max_h = config.image_size_range
    width = rng.randint(min_w, max_w)
    height = rng.randint(min_h, max_h)
    return render_label(rng, width, height, config)


def generate(
    seed: int,
    config: GenConfig,
    quality: QualityClass | int | str,
    image_path: str = "",
) -> GeneratedLabel:
    """generate_label with the clean render, intensity and recipe attached."""
    quality = QualityClass.parse(quality)
    clean = render_clean(seed, config)
    low, high = config.intensity_range(quality)
    intensity = Xoshiro256(derive_seed(seed, _INTENSITY_STREAM)).uniform(low, high)
    annotation = Annotation(
        image_path=image_path,
        quality=quality,
        barcode_box=clean.barcode_box,
        address_box=clean.address_box,
        seed=seed,
        address_lines=clean.address_lines,
    )
    result = degrade_label(
        clean.raster, annotation, quality, derive_seed(seed, _DEGRADE_STREAM), intensity
    )
    return GeneratedLabel(
        raster=result.raster,
        annotation=result.annotation,
        clean=clean,
        intensity=intensity,
        variant=result.variant,
    )


def generate_label(
    seed: int,
    config: GenConfig,
    quality: QualityClass | int | str,
    image_path: str = "",
) -> tuple[Raster, Annotation]:
    """
    Render a label for seed and degrade it as quality.

    Output is byte-identical for identical (seed, config, quality).

    Raises:
        ConfigTooSmall: the layout does not fit the drawn image size
        UnknownClass: quality is not one of the five classes
    """
    label = generate(seed, config, quality, image_path)
    return label.raster, label.annotation
