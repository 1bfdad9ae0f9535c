"""Shared fixtures: small seeded datasets, configs and a quickly trained model."""

from pathlib import Path

import numpy as np
import pytest

from shiplabel_qi.core.raster import Raster
from shiplabel_qi.evaluate.folds import holdout_split
from shiplabel_qi.features.patches import PatchSelectionConfig
from shiplabel_qi.fusion.config import FusionConfig
from shiplabel_qi.nn.train import TrainConfig
from shiplabel_qi.pipeline.config import TRAIN_KEYS, EvalConfig, PipelineConfig
from shiplabel_qi.pipeline.inputs import prepare_dataset
from shiplabel_qi.pipeline.model import QualityModel, input_spec
from shiplabel_qi.synth.config import GenConfig
from shiplabel_qi.synth.dataset import DatasetManifest, build_dataset


def small_gen_config() -> GenConfig:
    """Two images per class at the smallest default label size."""
    return GenConfig().with_count(2).with_seed(7).with_size_range(384, 288, 448, 320)


def small_pipeline_config(dataset_dir: Path, work_dir: Path) -> PipelineConfig:
    """A pipeline that trains in seconds: 16 px inputs, tiny features, two folds."""
    train = {key: TrainConfig(epochs=2, batch_size=8, input_side=16) for key in TRAIN_KEYS}
    train["fusion"] = TrainConfig(epochs=5, batch_size=8, input_side=16)
    return PipelineConfig(
        dataset_dir=str(dataset_dir),
        weights_dir=str(work_dir / "weights"),
        reports_dir=str(work_dir / "reports"),
        gen=small_gen_config(),
        patches=PatchSelectionConfig(t=50, patch_w=64, patch_h=64, n_p=3),
        train=train,
        fusion=FusionConfig(global_dim=8, local_dim=4, hidden=(8, 8)),
        detector="classical",
        eval=EvalConfig(k=2, seed=0),
    )


@pytest.fixture
def gen_config() -> GenConfig:
    return small_gen_config()


@pytest.fixture(scope="session")
def tiny_dataset(tmp_path_factory: pytest.TempPathFactory) -> DatasetManifest:
    """Ten generated labels (two per class) on disk."""
    return build_dataset(small_gen_config(), tmp_path_factory.mktemp("tiny_dataset"))


@pytest.fixture
def pipeline_config(tiny_dataset: DatasetManifest, tmp_path: Path) -> PipelineConfig:
    return small_pipeline_config(tiny_dataset.root, tmp_path)


@pytest.fixture(scope="session")
def trained_model_dir(
    tiny_dataset: DatasetManifest, tmp_path_factory: pytest.TempPathFactory
) -> Path:
    """Weights directory of a model trained on the tiny dataset."""
    work = tmp_path_factory.mktemp("trained")
    config = small_pipeline_config(tiny_dataset.root, work)
    labels = tiny_dataset.labels
    fit_idx, val_idx = holdout_split(list(range(len(tiny_dataset))), labels, 0.1, 0)
    inputs = prepare_dataset(tiny_dataset, range(len(tiny_dataset)), input_spec(config))
    model = QualityModel.train(
        inputs.take(fit_idx),
        [labels[i] for i in fit_idx],
        config,
        validation=(inputs.take(val_idx), [labels[i] for i in val_idx]),
    )
    model.save(work / "weights")
    return work / "weights"


@pytest.fixture
def noise_raster() -> Raster:
    """Seeded 64x64 uniform-noise grayscale image."""
    rng = np.random.default_rng(1234)
    return Raster.from_array(rng.integers(0, 256, size=(64, 64), dtype=np.uint8))


@pytest.fixture
def config_file(pipeline_config: PipelineConfig, tmp_path: Path) -> Path:
    """pipeline_config saved as JSON."""
    path = tmp_path / "pipeline.json"
    pipeline_config.save(path)
    return path
