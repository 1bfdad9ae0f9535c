"""Typer CLI application: gen, detect, patches, train, classify, eval."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import TYPE_CHECKING, Annotated, Any, Optional

import typer
from rich.console import Console
from rich.logging import RichHandler

from shiplabel_qi.core.errors import IoFailure

if TYPE_CHECKING:
    from shiplabel_qi.detect.roi import Detection
    from shiplabel_qi.pipeline.config import PipelineConfig

PACKAGE_LOGGER = "shiplabel_qi"


@dataclass
class State:
    """Options shared by every subcommand."""
    config_path: Optional[Path] = None
    seed: Optional[int] = None
    full_scale: bool = False
    console: Console = field(default_factory=Console)

    def pipeline_config(self) -> PipelineConfig:
        from shiplabel_qi.pipeline.config import PipelineConfig

        config = PipelineConfig.load(self.config_path) if self.config_path else PipelineConfig()
        if self.seed is not None:
            config.with_seed(self.seed)
        if self.full_scale:
            config.full_scale()
        return config


def configure_logging(verbose: bool, quiet: bool) -> None:
    """Route package logs through a RichHandler on stderr."""
    level = logging.DEBUG if verbose else logging.WARNING if quiet else logging.INFO
    pkg = logging.getLogger(PACKAGE_LOGGER)
    for handler in list(pkg.handlers):
        if isinstance(handler, RichHandler):
            pkg.removeHandler(handler)
    handler = RichHandler(console=Console(stderr=True), show_path=False, rich_tracebacks=False)
    handler.setFormatter(logging.Formatter("%(message)s"))
    pkg.addHandler(handler)
    pkg.setLevel(level)
    pkg.propagate = False


def create_app() -> typer.Typer:
    """Create and configure the CLI application."""
    app = typer.Typer(
        name="slqi",
        help="Shipping-label image-quality verification: generate, detect, train, classify, evaluate.",
        no_args_is_help=True,
        rich_markup_mode="rich",
        add_completion=False,
    )

    @app.callback()
    def main_options(
        ctx: typer.Context,
        config: Annotated[Optional[Path], typer.Option("--config", "-c", help="Pipeline config JSON")] = None,
        seed: Annotated[Optional[int], typer.Option("--seed", help="Master seed for generation, training and folds")] = None,
        full_scale: Annotated[bool, typer.Option("--full-scale", "--paper-scale", help="2048/512 feature dims")] = False,
        verbose: Annotated[bool, typer.Option("--verbose", "-v", help="Debug logging")] = False,
        quiet: Annotated[bool, typer.Option("--quiet", "-q", help="Warnings only")] = False,
    ) -> None:
        configure_logging(verbose, quiet)
        ctx.obj = State(config_path=config, seed=seed, full_scale=full_scale)

    @app.command()
    def gen(
        ctx: typer.Context,
        out: Annotated[Optional[Path], typer.Option("--out", "-o", help="Dataset directory")] = None,
        count: Annotated[Optional[int], typer.Option("--count", "-n", help="Images per class")] = None,
    ) -> None:
        """Generate a synthetic labeled dataset."""
        from shiplabel_qi.synth.dataset import build_dataset

        state: State = ctx.obj
        config = state.pipeline_config()
        gen_config = config.gen if count is None else config.gen.with_count(count)
        out_dir = out or Path(config.dataset_dir)
        manifest = build_dataset(gen_config, out_dir)
        counts = ", ".join(f"{c.label} {n}" for c, n in manifest.class_counts().items())
        state.console.print(f"[green]Generated {len(manifest)} labels[/] in {out_dir} ({counts})")

    @app.command()
    def detect(
        ctx: typer.Context,
        data: Annotated[Optional[Path], typer.Option("--data", "-d", help="Dataset directory")] = None,
        method: Annotated[Optional[str], typer.Option("--method", "-m", help="oracle or classical")] = None,
        output: Annotated[Optional[Path], typer.Option("--output", "-o", help="Detections JSONL")] = None,
        iou_threshold: Annotated[float, typer.Option("--iou", help="IoU threshold for AP")] = 0.5,
    ) -> None:
        """Detect barcode and address regions and report AP."""
        from shiplabel_qi.detect.metrics import average_precision, ground_truth_from_annotations
        from shiplabel_qi.detect.roi import detect_rois
        from shiplabel_qi.parallel import ordered_map
        from shiplabel_qi.render.json_format import JsonlRenderer, JsonRenderer
        from shiplabel_qi.render.text import detection_table
        from shiplabel_qi.synth.dataset import load_manifest

        state: State = ctx.obj
        config = state.pipeline_config()
        manifest = load_manifest(data or config.dataset_dir)
        method = method or config.detector

        def run(index: int) -> list[Detection]:
            annotation = manifest[index]
            found = detect_rois(manifest.load_image(index), method, annotation)
            return [replace(d, image=annotation.image_path) for d in found]

        detections = [d for found in ordered_map(run, range(len(manifest))) for d in found]
        metrics = average_precision(
            detections, ground_truth_from_annotations(list(manifest)), iou_threshold
        )
        out_path = output or Path(config.reports_dir) / "detections.jsonl"
        try:
            out_path.parent.mkdir(parents=True, exist_ok=True)
            out_path.write_text(JsonlRenderer().render(d.to_dict() for d in detections), encoding="utf-8")
            out_path.with_name("detection_metrics.json").write_text(
                JsonRenderer().render(metrics.to_dict()), encoding="utf-8"
            )
        except OSError as e:
            raise IoFailure(f"Cannot write detections to {out_path}: {e}") from e
        state.console.print(detection_table(metrics), end="")
        state.console.print(f"[dim]Detections written to {out_path}[/]")

    @app.command()
    def patches(
        ctx: typer.Context,
        image: Annotated[Path, typer.Argument(help="Label image")],
        out: Annotated[Path, typer.Option("--out", "-o", help="Directory for the selected patches")] = Path("patches"),
    ) -> None:
        """Dump the tiles with the most FAST corners."""
        from shiplabel_qi.features.patches import select_patches
        from shiplabel_qi.io.reader import load
        from shiplabel_qi.io.writer import save
        from shiplabel_qi.render.json_format import JsonRenderer

        state: State = ctx.obj
        config = state.pipeline_config()
        patch_set = select_patches(load(image), config.patches)
        out.mkdir(parents=True, exist_ok=True)
        for k, patch in enumerate(patch_set.patches):
            save(patch, out / f"patch_{k}.pnm")
        summary = {
            "image": str(image),
            "grid": list(patch_set.grid),
            "tile_counts": list(patch_set.tile_counts),
            "selected": list(patch_set.selected),
            "origins": [list(o) for o in patch_set.selected_origins],
            "counts": patch_set.selected_counts,
        }
        (out / "patches.json").write_text(JsonRenderer().render(summary), encoding="utf-8")
        for k, (origin, n) in enumerate(zip(patch_set.selected_origins, patch_set.selected_counts)):
            state.console.print(f"patch_{k}: tile at {origin}, {n} corners")

    @app.command()
    def train(
        ctx: typer.Context,
        data: Annotated[Optional[Path], typer.Option("--data", "-d", help="Dataset directory")] = None,
        weights: Annotated[Optional[Path], typer.Option("--weights", "-w", help="Output weights directory")] = None,
    ) -> None:
        """Train the four branch extractors and the fusion head."""
        from shiplabel_qi.evaluate.folds import holdout_split
        from shiplabel_qi.pipeline.inputs import prepare_dataset
        from shiplabel_qi.pipeline.model import QualityModel, input_spec
        from shiplabel_qi.render.json_format import JsonRenderer
        from shiplabel_qi.synth.dataset import load_manifest

        state: State = ctx.obj
        config = state.pipeline_config()
        manifest = load_manifest(data or config.dataset_dir)
        labels = manifest.labels
        fit_idx, val_idx = holdout_split(
            list(range(len(manifest))), labels, config.eval.validation_fraction, config.eval.seed
        )
        inputs = prepare_dataset(manifest, range(len(manifest)), input_spec(config))
        model = QualityModel.train(
            inputs.take(fit_idx),
            [labels[i] for i in fit_idx],
            config,
            validation=(inputs.take(val_idx), [labels[i] for i in val_idx]),
        )
        out_dir = weights or Path(config.weights_dir)
        model.save(out_dir)
        history = {b.label: p.history.to_dict() for b, p in model.extractors.items() if p.history}
        if model.fusion.history:
            history["fusion"] = model.fusion.history.to_dict()
        (out_dir / "history.json").write_text(JsonRenderer().render(history), encoding="utf-8")
        state.console.print(f"[green]Trained model written to {out_dir}[/]")

    @app.command()
    def classify(
        ctx: typer.Context,
        images: Annotated[Optional[list[Path]], typer.Argument(help="Label images")] = None,
        data: Annotated[Optional[Path], typer.Option("--data", "-d", help="Classify a whole dataset")] = None,
        weights: Annotated[Optional[Path], typer.Option("--weights", "-w", help="Weights directory")] = None,
        output: Annotated[Optional[Path], typer.Option("--output", "-o", help="JSONL output file")] = None,
    ) -> None:
        """Classify images; one JSONL line per image."""
        from shiplabel_qi.io.reader import load
        from shiplabel_qi.parallel import ordered_map
        from shiplabel_qi.pipeline.model import QualityModel
        from shiplabel_qi.render.json_format import JsonlRenderer
        from shiplabel_qi.synth.dataset import load_manifest

        state: State = ctx.obj
        config = state.pipeline_config()
        if not images and data is None:
            raise typer.BadParameter("Give image paths or --data DIR")
        model = QualityModel.load(weights or config.weights_dir)

        manifest = load_manifest(data) if data is not None else None
        # Dataset entries are classified by index, loose files by path
        jobs: list[int | Path] = list(range(len(manifest))) if manifest is not None else []
        jobs += list(images or [])

        def run(job: int | Path) -> dict[str, Any]:
            if isinstance(job, Path):
                return {"path": str(job), **model.classify(load(job)).to_dict()}
            assert manifest is not None
            annotation = manifest[job]
            prediction = model.classify(manifest.load_image(job), annotation)
            return {"path": annotation.image_path, **prediction.to_dict()}

        text = JsonlRenderer().render(ordered_map(run, jobs))
        if output is None:
            typer.echo(text, nl=False)
        else:
            output.write_text(text, encoding="utf-8")
            state.console.print(f"[green]Classified {len(jobs)} images[/] → {output}")

    @app.command("eval")
    def evaluate(
        ctx: typer.Context,
        data: Annotated[Optional[Path], typer.Option("--data", "-d", help="Dataset directory")] = None,
        reports: Annotated[Optional[Path], typer.Option("--reports", "-r", help="Reports directory")] = None,
        k: Annotated[Optional[int], typer.Option("--k", help="Number of folds")] = None,
        quota: Annotated[Optional[int], typer.Option("--quota", help="Test images per class per fold")] = None,
        augment: Annotated[bool, typer.Option("--augment", help="Augment minority classes in training folds")] = False,
    ) -> None:
        """Run k-fold cross-validation and write report.json and tables.txt."""
        from shiplabel_qi.pipeline.config import EvalConfig
        from shiplabel_qi.pipeline.experiment import CrossValidationExperiment
        from shiplabel_qi.synth.dataset import load_manifest

        state: State = ctx.obj
        config = state.pipeline_config()
        ev = config.eval
        config.eval = EvalConfig(
            k=k if k is not None else ev.k,
            seed=ev.seed,
            quota=quota if quota is not None else ev.quota,
            validation_fraction=ev.validation_fraction,
            augment_minority=augment or ev.augment_minority,
        )
        manifest = load_manifest(data or config.dataset_dir)
        report = CrossValidationExperiment(config, manifest).run()
        out_dir = reports or Path(config.reports_dir)
        report.write(out_dir)
        state.console.print(report.tables(), end="", markup=False)
        state.console.print(f"[dim]Reports written to {out_dir}[/]")

    return app
