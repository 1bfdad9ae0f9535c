"""Dataset generation and the JSONL manifest.

A dataset directory holds::

    manifest.jsonl      header line, then one Annotation per line
    gen_config.json     the GenConfig that produced it
    images/NNNNNN.pnm   one image per manifest line
"""

from __future__ import annotations

import json
import logging
from collections import Counter
from collections.abc import Iterator
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Union

from shiplabel_qi.codec.pnm import write_pnm
from shiplabel_qi.core.errors import IoFailure
from shiplabel_qi.core.labels import Annotation, QualityClass
from shiplabel_qi.core.raster import Raster
from shiplabel_qi.core.rng import derive_seed
from shiplabel_qi.core.serial import canonical_json
from shiplabel_qi.io.reader import load
from shiplabel_qi.parallel import ordered_map
from shiplabel_qi.synth.config import GenConfig
from shiplabel_qi.synth.generator import generate

logger = logging.getLogger(__name__)

MANIFEST_VERSION = 1
MANIFEST_NAME = "manifest.jsonl"
CONFIG_NAME = "gen_config.json"
IMAGE_DIR = "images"


@dataclass
class DatasetManifest:
    """Ordered annotations of a generated dataset plus the config echo."""
    annotations: list[Annotation]
    config: GenConfig = field(default_factory=GenConfig)
    version: int = MANIFEST_VERSION
    root: Path | None = None

    def __len__(self) -> int:
        return len(self.annotations)

    def __iter__(self) -> Iterator[Annotation]:
        return iter(self.annotations)

    def __getitem__(self, index: int) -> Annotation:
        return self.annotations[index]

    @property
    def config_hash(self) -> str:
        return self.config.config_hash()

    @property
    def labels(self) -> list[QualityClass]:
        return [a.quality for a in self.annotations]

    def class_counts(self) -> dict[QualityClass, int]:
        counts = Counter(self.labels)
        return {c: counts.get(c, 0) for c in QualityClass}

    def subset(self, indices: list[int]) -> DatasetManifest:
        """Manifest of the given entries, in the given order."""
        return DatasetManifest(
            annotations=[self.annotations[i] for i in indices],
            config=self.config,
            version=self.version,
            root=self.root,
        )

    def image_path(self, annotation: Annotation) -> Path:
        root = self.root or Path(".")
        return root / annotation.image_path

    def load_image(self, index: int) -> Raster:
        return load(self.image_path(self.annotations[index]))

    def header(self) -> dict[str, Any]:
        return {"version": self.version, "config_hash": self.config_hash}

    def to_jsonl(self) -> str:
        """Manifest file contents; byte-identical for identical datasets."""
        lines = [canonical_json(self.header())]
        lines.extend(canonical_json(a.to_dict()) for a in self.annotations)
        return "\n".join(lines) + "\n"


def image_name(index: int) -> str:
    return f"{IMAGE_DIR}/{index:06d}.pnm"


def dataset_plan(config: GenConfig) -> list[tuple[int, QualityClass]]:
    """(index, class) for every image, class-major in class-code order."""
    plan = []
    for quality in QualityClass:
        for _ in range(config.count_for(quality)):
            plan.append((len(plan), quality))
    return plan


def build_dataset(config: GenConfig, out_dir: Union[str, Path]) -> DatasetManifest:
    """
    Generate every image of config into out_dir and write the manifest.

    Image seeds are derive_seed(master_seed, index). Generation runs through
    ordered_map, so the output never depends on SLQI_THREADS.

    Raises:
        IoFailure: out_dir or a file in it cannot be written
    """
    root = Path(out_dir)
    try:
        (root / IMAGE_DIR).mkdir(parents=True, exist_ok=True)
    except OSError as e:
        raise IoFailure(f"Cannot create dataset directory {root}: {e}") from e

    plan = dataset_plan(config)
    logger.info("Generating %d labels into %s", len(plan), root)

    def make(item: tuple[int, QualityClass]) -> Annotation:
        index, quality = item
        seed = derive_seed(config.master_seed, index)
        name = image_name(index)
        label = generate(seed, config, quality, image_path=name)
        try:
            (root / name).write_bytes(write_pnm(label.raster))
        except OSError as e:
            raise IoFailure(f"Cannot write {root / name}: {e}") from e
        if index % 100 == 99:
            logger.info("Generated %d/%d labels", index + 1, len(plan))
        return label.annotation

    annotations = ordered_map(make, plan)
    manifest = DatasetManifest(annotations=annotations, config=config, root=root)
    try:
        (root / MANIFEST_NAME).write_text(manifest.to_jsonl(), encoding="utf-8")
        (root / CONFIG_NAME).write_text(
            json.dumps(config.to_dict(), indent=2, sort_keys=True) + "\n", encoding="utf-8"
        )
    except OSError as e:
        raise IoFailure(f"Cannot write manifest in {root}: {e}") from e
    logger.info("Dataset complete: %s", {c.label: n for c, n in manifest.class_counts().items()})
    return manifest


def load_manifest(path: Union[str, Path]) -> DatasetManifest:
    """
    Read a dataset directory (or its manifest.jsonl) back.

    Raises:
        IoFailure: the manifest is missing or malformed
    """
    path = Path(path)
    root = path if path.is_dir() else path.parent
    manifest_path = root / MANIFEST_NAME if path.is_dir() else path
    try:
        text = manifest_path.read_text(encoding="utf-8")
    except OSError as e:
        raise IoFailure(f"Cannot read manifest {manifest_path}: {e}") from e

    config = GenConfig()
    config_path = root / CONFIG_NAME
    if config_path.exists():
        config = GenConfig.from_dict(json.loads(config_path.read_text(encoding="utf-8")))

    lines = [line for line in text.splitlines() if line.strip()]
    if not lines:
        raise IoFailure(f"Manifest {manifest_path} is empty")
    try:
        header = json.loads(lines[0])
        annotations = [Annotation.from_dict(json.loads(line)) for line in lines[1:]]
    except (ValueError, KeyError) as e:
        raise IoFailure(f"Malformed manifest {manifest_path}: {e}") from e
    version = int(header.get("version", MANIFEST_VERSION))
    if version != MANIFEST_VERSION:
        raise IoFailure(f"Unsupported manifest version {version}")
    return DatasetManifest(annotations=annotations, config=config, version=version, root=root)
