"""Class-specific label degradations.

Each quality class maps to a recipe that damages a clean label render the
way real acquisition or handling does. Contamination and handwriting never
touch pixels outside the address box grown by HALO pixels.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy import ndimage
from skimage import draw

from shiplabel_qi.core.errors import ConfigError
from shiplabel_qi.core.labels import Annotation, QualityClass
from shiplabel_qi.core.raster import BoundingBox, Raster
from shiplabel_qi.core.rng import Xoshiro256
from shiplabel_qi.synth import font
from shiplabel_qi.transform.color import to_grayscale
from shiplabel_qi.transform.geometry import resize_bilinear

logger = logging.getLogger(__name__)

HALO = 16
MOTION_TAPS = 9

STAIN_COLORS = ((70, 50, 35), (45, 45, 50), (95, 75, 40), (60, 30, 30))
PEN_COLORS = ((30, 40, 160), (160, 30, 40), (35, 35, 35))
HAND_COLORS = ((25, 35, 110), (30, 30, 30))
CARDBOARD = (165, 125, 85)
STICKER_COLORS = ((215, 200, 150), (190, 190, 195), (235, 220, 90))


@dataclass(frozen=True)
class DegradationResult:
    """Degraded image, its (possibly moved) annotation and the recipe used."""
    raster: Raster
    annotation: Annotation
    variant: str


def variance_of_laplacian(raster: Raster) -> float:
    """Sharpness metric: variance of the Laplacian of the gray image."""
    gray = to_grayscale(raster).plane().astype(np.float64)
    return float(ndimage.laplace(gray).var())


def _random_point(rng: Xoshiro256, box: BoundingBox) -> tuple[int, int]:
    return rng.randint(box.x, box.x2 - 1), rng.randint(box.y, box.y2 - 1)


# Unreadable

def gaussian_blur(raster: Raster, sigma: float) -> Raster:
    """Blur each channel with a Gaussian of the given sigma."""
    px = raster.pixels.astype(np.float64)
    out = ndimage.gaussian_filter(px, sigma=(sigma, sigma, 0), mode="nearest")
    return Raster.from_array(out)


def motion_kernel(angle_deg: float, taps: int = MOTION_TAPS) -> np.ndarray:
    """Normalized line kernel of `taps` samples along angle_deg."""
    kernel = np.zeros((taps, taps), dtype=np.float64)
    c = taps // 2
    dx, dy = math.cos(math.radians(angle_deg)), math.sin(math.radians(angle_deg))
    for i in range(-c, c + 1):
        kernel[int(round(c + i * dy)), int(round(c + i * dx))] = 1.0
    return kernel / kernel.sum()


def motion_blur(raster: Raster, angle_deg: float, taps: int = MOTION_TAPS) -> Raster:
    kernel = motion_kernel(angle_deg, taps)
    px = raster.pixels.astype(np.float64)
    out = np.stack(
        [ndimage.convolve(px[:, :, c], kernel, mode="nearest") for c in range(raster.channels)],
        axis=2,
    )
    return Raster.from_array(out)


def rescale_blur(raster: Raster, factor: int) -> Raster:
    """Downscale by factor and back up to the original size."""
    small = resize_bilinear(
        raster, max(1, raster.width // factor), max(1, raster.height // factor)
    )
    return resize_bilinear(small, raster.width, raster.height)


def misplaced_crop(
    raster: Raster, annotation: Annotation, rng: Xoshiro256, fraction: float
) -> tuple[Raster, Annotation] | None:
    """
    Crop the image so that `fraction` (>= 0.5) of the address box is lost.

    The barcode stays wholly inside the crop. Returns None when no side can
    be cut without losing the barcode.
    """
    a, b = annotation.address_box, annotation.barcode_box
    w, h = raster.width, raster.height
    sides = ["top", "bottom", "left", "right"]
    rng.shuffle(sides)
    for side in sides:
        if side == "top":
            cut = a.y + math.ceil(fraction * a.h)
            if b.y < cut:
                continue
            keep = BoundingBox(0, cut, w, h - cut)
        elif side == "bottom":
            cut = a.y2 - math.ceil(fraction * a.h)
            if b.y2 > cut:
                continue
            keep = BoundingBox(0, 0, w, cut)
        elif side == "left":
            cut = a.x + math.ceil(fraction * a.w)
            if b.x < cut:
                continue
            keep = BoundingBox(cut, 0, w - cut, h)
        else:
            cut = a.x2 - math.ceil(fraction * a.w)
            if b.x2 > cut:
                continue
            keep = BoundingBox(0, 0, cut, h)
        remaining = a.intersection(keep)
        if remaining is None:
            continue
        cropped = Raster(raster.pixels[keep.y:keep.y2, keep.x:keep.x2].copy())
        moved = annotation.with_boxes(
            b.translate(-keep.x, -keep.y), remaining.translate(-keep.x, -keep.y)
        )
        return cropped, moved
    return None


def _unreadable(
    raster: Raster, annotation: Annotation, rng: Xoshiro256, intensity: float
) -> DegradationResult:
    variant = rng.choice(("gaussian", "motion", "rescale", "crop"))
    if variant == "crop":
        fraction = 0.5 + 0.3 * intensity
        cropped = misplaced_crop(raster, annotation, rng, fraction)
        if cropped is not None:
            return DegradationResult(cropped[0], cropped[1], "crop")
        variant = "gaussian"
    if variant == "gaussian":
        out = gaussian_blur(raster, 1.5 + 2.5 * intensity)
    elif variant == "motion":
        out = motion_blur(raster, rng.uniform(0.0, 180.0))
    else:
        out = rescale_blur(raster, 2 + min(2, int(intensity * 3)))
    return DegradationResult(out, annotation, variant)


# Contaminated

def _halo_mask(shape: tuple[int, int], box: BoundingBox) -> np.ndarray:
    h, w = shape
    halo = box.expand(HALO, w, h)
    mask = np.zeros(shape, dtype=bool)
    mask[halo.y:halo.y2, halo.x:halo.x2] = True
    return mask


def _blob_mask(
    shape: tuple[int, int], rng: Xoshiro256, center: tuple[int, int], radius: float
) -> np.ndarray:
    """Irregular filled blob: a polygon with jittered radii around center."""
    n = rng.randint(7, 12)
    angles = [2 * math.pi * (i + rng.uniform(-0.3, 0.3)) / n for i in range(n)]
    radii = [radius * rng.uniform(0.6, 1.2) for _ in range(n)]
    cx, cy = center
    rows = [cy + r * math.sin(t) for r, t in zip(radii, angles)]
    cols = [cx + r * math.cos(t) for r, t in zip(radii, angles)]
    mask = np.zeros(shape, dtype=bool)
    rr, cc = draw.polygon(rows, cols, shape=shape)
    mask[rr, cc] = True
    rr, cc = draw.disk((cy, cx), max(1.0, radius * 0.5), shape=shape)
    mask[rr, cc] = True
    return mask


def _stroke_mask(
    shape: tuple[int, int], rng: Xoshiro256, box: BoundingBox, halo: BoundingBox, width: int
) -> np.ndarray:
    """Pen polyline starting inside box and wandering within halo."""
    mask = np.zeros(shape, dtype=bool)
    x, y = _random_point(rng, box)
    for _ in range(rng.randint(2, 5)):
        nx, ny = _random_point(rng, halo)
        rr, cc = draw.line(y, x, ny, nx)
        mask[rr, cc] = True
        x, y = nx, ny
    if width > 1:
        mask = ndimage.binary_dilation(mask, iterations=width // 2)
    return mask


def _contaminated(
    raster: Raster, annotation: Annotation, rng: Xoshiro256, intensity: float
) -> DegradationResult:
    px = raster.pixels.copy()
    shape = (raster.height, raster.width)
    box = annotation.address_box
    halo = box.expand(HALO, raster.width, raster.height)
    limit = _halo_mask(shape, box)
    variant = rng.choice(("blob", "stroke", "mixed"))
    count = rng.randint(1, 1 + min(3, int(intensity * 4)))
    for i in range(count):
        use_blob = variant == "blob" or (variant == "mixed" and i % 2 == 0)
        if use_blob:
            radius = min(box.w, box.h) * (0.15 + 0.35 * intensity) + 2
            mask = _blob_mask(shape, rng, _random_point(rng, box), radius)
            color = rng.choice(STAIN_COLORS)
        else:
            mask = _stroke_mask(shape, rng, box, halo, rng.randint(1, 3))
            color = rng.choice(PEN_COLORS)
        px[mask & limit] = color
    return DegradationResult(Raster(px), annotation, variant)


# Handwritten

def _jittered_glyph(ch: str, scale: int, rng: Xoshiro256) -> np.ndarray:
    mask = font.glyph_mask(ch, scale).astype(np.uint8)
    angle = rng.uniform(-8.0, 8.0)
    rotated = ndimage.rotate(mask, angle, reshape=True, order=0) > 0
    if rng.below(3) == 0:
        rotated = ndimage.binary_dilation(rotated)
    elif scale > 1 and rng.below(3) == 0:
        thinned = ndimage.binary_erosion(rotated)
        if thinned.any():
            rotated = thinned
    return rotated


def _handwritten(
    raster: Raster, annotation: Annotation, rng: Xoshiro256, intensity: float
) -> DegradationResult:
    px = raster.pixels.copy()
    box = annotation.address_box
    halo = box.expand(HALO, raster.width, raster.height)
    px[box.y:box.y2, box.x:box.x2] = 255

    lines = annotation.address_lines or ("?",)
    # Receiver blocks are n lines of 7s rows with 2s-row gaps
    scale = max(1, box.h // (9 * len(lines) - 2))
    color = rng.choice(HAND_COLORS)
    line_step = font.GLYPH_H * scale + 2 * scale
    for row, line in enumerate(lines):
        base_y = box.y + row * line_step
        wander = 0
        for col, ch in enumerate(line):
            if ch == " ":
                continue
            glyph = _jittered_glyph(ch, scale, rng)
            wander = max(-2, min(2, wander + rng.randint(-1, 1)))
            gx = box.x + col * font.advance(scale) + rng.randint(-1, 1)
            gy = base_y + wander
            gh, gw = glyph.shape
            x1, y1 = max(gx, halo.x), max(gy, halo.y)
            x2, y2 = min(gx + gw, halo.x2), min(gy + gh, halo.y2)
            if x2 <= x1 or y2 <= y1:
                continue
            sub = glyph[y1 - gy:y2 - gy, x1 - gx:x2 - gx]
            px[y1:y2, x1:x2][sub] = color
    return DegradationResult(Raster(px), annotation, "handwriting")


# Damaged

def _texture(rng: Xoshiro256, shape: tuple[int, int], base: tuple[int, int, int]) -> np.ndarray:
    """Smoothed noise around base color, shape (h, w, 3) float."""
    noise = rng.numpy_generator().normal(0.0, 18.0, size=shape)
    noise = ndimage.gaussian_filter(noise, 1.5)
    return np.clip(np.asarray(base, dtype=np.float64) + noise[:, :, np.newaxis], 0, 255)


def _target_box(annotation: Annotation, rng: Xoshiro256) -> BoundingBox:
    return annotation.address_box if rng.below(2) == 0 else annotation.barcode_box


def _tear(
    raster: Raster, annotation: Annotation, rng: Xoshiro256, intensity: float
) -> np.ndarray:
    """Mask of a jagged region torn from the edge nearest a target point."""
    w, h = raster.width, raster.height
    tx, ty = _random_point(rng, _target_box(annotation, rng))
    distances = {"top": ty, "bottom": h - 1 - ty, "left": tx, "right": w - 1 - tx}
    edge = min(distances, key=lambda k: distances[k])
    spread = (0.15 + 0.25 * intensity) * (w if edge in ("top", "bottom") else h)

    # Walk from the edge to the target and back with jagged steps
    steps = rng.randint(3, 6)
    along_a = (tx if edge in ("top", "bottom") else ty) - spread / 2
    along_b = along_a + spread
    pts: list[tuple[float, float]] = []
    depth = float(distances[edge]) + rng.uniform(2.0, 12.0)
    for i in range(steps + 1):
        t = i / steps
        along = along_a + t * (along_b - along_a)
        d = depth * math.sin(math.pi * t) ** 0.5 + rng.uniform(-4.0, 4.0)
        pts.append((along, max(0.0, d)))
    rows, cols = [], []
    for along, d in [(along_a, -1.0), *pts, (along_b, -1.0)]:
        if edge == "top":
            cols.append(along)
            rows.append(d)
        elif edge == "bottom":
            cols.append(along)
            rows.append(h - 1 - d)
        elif edge == "left":
            rows.append(along)
            cols.append(d)
        else:
            rows.append(along)
            cols.append(w - 1 - d)
    mask = np.zeros((h, w), dtype=bool)
    rr, cc = draw.polygon(rows, cols, shape=(h, w))
    mask[rr, cc] = True
    rr, cc = draw.disk((ty, tx), 3, shape=(h, w))
    mask[rr, cc] = True
    return mask


def _occlusion(
    raster: Raster, annotation: Annotation, rng: Xoshiro256, intensity: float
) -> np.ndarray:
    """Mask of a rectangle covering >= 20% of the label over a target point."""
    w, h = raster.width, raster.height
    tx, ty = _random_point(rng, _target_box(annotation, rng))
    area = (0.2 + 0.15 * intensity) * w * h
    rect_w = min(w, max(1, int(math.sqrt(area * rng.uniform(0.6, 1.8)))))
    rect_h = min(h, math.ceil(area / rect_w))
    rect_w = min(w, max(rect_w, math.ceil(area / rect_h)))
    x = rng.randint(max(0, tx - rect_w + 1), min(tx, w - rect_w))
    y = rng.randint(max(0, ty - rect_h + 1), min(ty, h - rect_h))
    mask = np.zeros((h, w), dtype=bool)
    mask[y:y + rect_h, x:x + rect_w] = True
    return mask


def _damaged(
    raster: Raster, annotation: Annotation, rng: Xoshiro256, intensity: float
) -> DegradationResult:
    px = raster.pixels.astype(np.float64)
    shape = (raster.height, raster.width)
    if rng.below(2) == 0:
        variant = "tear"
        mask = _tear(raster, annotation, rng, intensity)
        fill = _texture(rng, shape, CARDBOARD)
        edge = mask & ~ndimage.binary_erosion(mask)
        px[mask] = fill[mask]
        px[edge] *= 0.6
    else:
        variant = "occlusion"
        mask = _occlusion(raster, annotation, rng, intensity)
        fill = _texture(rng, shape, rng.choice(STICKER_COLORS))
        px[mask] = fill[mask]
    return DegradationResult(Raster.from_array(px), annotation, variant)


_RECIPES = {
    QualityClass.CONTAMINATED: _contaminated,
    QualityClass.UNREADABLE: _unreadable,
    QualityClass.HANDWRITTEN: _handwritten,
    QualityClass.DAMAGED: _damaged,
}


def degrade_label(
    raster: Raster,
    annotation: Annotation,
    quality: QualityClass | int | str,
    seed: int,
    intensity: float,
) -> DegradationResult:
    """
    Apply the degradation recipe of a quality class.

    Normal returns the input unchanged. The misplaced-crop variant of
    Unreadable returns a smaller image and moves the annotation boxes.

    Raises:
        UnknownClass: quality is not one of the five classes
        ConfigError: intensity outside [0, 1]
    """
    quality = QualityClass.parse(quality)
    if not 0.0 <= intensity <= 1.0:
        raise ConfigError(f"Degradation intensity must lie in [0, 1], got {intensity}")
    if quality is QualityClass.NORMAL:
        return DegradationResult(raster, annotation, "none")
    gray = raster.channels == 1
    if gray:
        raster = Raster(np.repeat(raster.pixels, 3, axis=2))
    result = _RECIPES[quality](raster, annotation, Xoshiro256(seed), intensity)
    if gray:
        result = DegradationResult(to_grayscale(result.raster), result.annotation, result.variant)
    logger.debug("Applied %s/%s at intensity %.2f", quality.label, result.variant, intensity)
    return result


def apply_degradation(
    raster: Raster,
    annotation: Annotation,
    quality: QualityClass | int | str,
    seed: int,
    intensity: float,
) -> Raster:
    """Degraded image only; see degrade_label."""
    return degrade_label(raster, annotation, quality, seed, intensity).raster
