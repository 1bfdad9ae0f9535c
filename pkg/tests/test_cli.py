"""Tests for the slqi command line."""

import json

import pytest

from shiplabel_qi.cli import run_cli
from shiplabel_qi.cli.app import State
from shiplabel_qi.io.writer import save
from shiplabel_qi.pipeline.config import PipelineConfig
from shiplabel_qi.synth.dataset import CONFIG_NAME, MANIFEST_NAME


def tree(root) -> dict[str, bytes]:
    return {str(p.relative_to(root)): p.read_bytes() for p in sorted(root.rglob("*")) if p.is_file()}


class TestUsage:
    """Tests for exit codes on bad invocations."""

    def test_unknown_command(self) -> None:
        assert run_cli(["bogus"]) == 1

    def test_unknown_option(self) -> None:
        assert run_cli(["gen", "--colour", "red"]) == 1

    def test_classify_needs_input(self) -> None:
        assert run_cli(["classify"]) == 1

    def test_bad_config_key(self, tmp_path) -> None:
        config = tmp_path / "bad.json"
        config.write_text(json.dumps({"colour": "red"}))
        assert run_cli(["--config", str(config), "gen", "--out", str(tmp_path / "d")]) == 2

    def test_missing_dataset(self, tmp_path) -> None:
        assert run_cli(["detect", "--data", str(tmp_path / "nowhere")]) == 2

    def test_png_without_image_extra(self, tmp_path, monkeypatch) -> None:
        import shiplabel_qi.io.image as image_io

        monkeypatch.setattr(image_io, "HAS_PIL", False)
        photo = tmp_path / "label.png"
        photo.write_bytes(b"\x89PNG\r\n\x1a\n")
        assert run_cli(["patches", str(photo), "--out", str(tmp_path / "p")]) == 2


class TestGlobalOptions:
    """Tests for options shared by every command."""

    @pytest.fixture
    def seen(self, monkeypatch) -> list[PipelineConfig]:
        """Every config a command builds from the global options."""
        configs: list[PipelineConfig] = []
        original = State.pipeline_config

        def recording(state: State) -> PipelineConfig:
            config = original(state)
            configs.append(config)
            return config

        monkeypatch.setattr(State, "pipeline_config", recording)
        return configs

    @pytest.mark.parametrize("flag", ["--paper-scale", "--full-scale"])
    def test_scale_flag_switches_feature_dims(self, flag: str, seen, tmp_path) -> None:
        assert run_cli(["-q", flag, "gen", "--out", str(tmp_path / "d"), "--count", "1"]) == 0
        assert seen[0].fusion.global_dim == 2048
        assert seen[0].fusion.local_dim == 512

    def test_default_scale(self, seen, tmp_path) -> None:
        assert run_cli(["-q", "gen", "--out", str(tmp_path / "d"), "--count", "1"]) == 0
        assert seen[0].fusion.global_dim == PipelineConfig().fusion.global_dim
        assert seen[0].fusion.global_dim != 2048


class TestGen:
    """Tests for dataset generation from the command line."""

    def test_seeded_runs_are_identical(self, tmp_path) -> None:
        for name in ("a", "b"):
            assert run_cli(["--seed", "42", "gen", "--out", str(tmp_path / name), "--count", "1"]) == 0
        a, b = tree(tmp_path / "a"), tree(tmp_path / "b")
        assert MANIFEST_NAME in a and CONFIG_NAME in a
        assert len(a) == 7
        assert a == b

    def test_different_seed_differs(self, tmp_path) -> None:
        run_cli(["--seed", "1", "gen", "--out", str(tmp_path / "a"), "--count", "1"])
        run_cli(["--seed", "2", "gen", "--out", str(tmp_path / "b"), "--count", "1"])
        assert tree(tmp_path / "a") != tree(tmp_path / "b")


class TestDetectAndPatches:
    """Tests for the detect and patches commands."""

    def test_oracle_detection(self, tiny_dataset, tmp_path) -> None:
        out = tmp_path / "out" / "detections.jsonl"
        code = run_cli(["detect", "--data", str(tiny_dataset.root), "--method", "oracle", "--output", str(out)])
        assert code == 0
        lines = [json.loads(line) for line in out.read_text().splitlines()]
        assert len(lines) == 20
        assert {line["kind"] for line in lines} == {"barcode", "address"}
        assert all(line["conf"] == 1.0 for line in lines)
        metrics = json.loads((out.parent / "detection_metrics.json").read_text())
        assert metrics["map"] == pytest.approx(1.0)

    def test_patches(self, tiny_dataset, tmp_path) -> None:
        image = tmp_path / "label.pnm"
        save(tiny_dataset.load_image(0), image)
        out = tmp_path / "patches"
        assert run_cli(["patches", str(image), "--out", str(out)]) == 0
        for k in range(3):
            assert (out / f"patch_{k}.pnm").is_file()
        summary = json.loads((out / "patches.json").read_text())
        assert len(summary["selected"]) == 3
        assert summary["counts"] == sorted(summary["counts"], reverse=True)


class TestClassify:
    """Tests for classification output."""

    def test_dataset_jsonl(self, config_file, trained_model_dir, tiny_dataset, capsys) -> None:
        code = run_cli([
            "--config", str(config_file), "classify",
            "--weights", str(trained_model_dir), "--data", str(tiny_dataset.root),
        ])
        assert code == 0
        lines = [json.loads(line) for line in capsys.readouterr().out.splitlines() if line.startswith("{")]
        assert len(lines) == 10
        assert [line["path"] for line in lines] == [a.image_path for a in tiny_dataset]
        for line in lines:
            assert set(line) == {"path", "class", "label", "probabilities", "action"}
            assert sum(line["probabilities"]) == pytest.approx(1.0)

    def test_output_file(self, trained_model_dir, tiny_dataset, tmp_path) -> None:
        image = tmp_path / "label.pnm"
        save(tiny_dataset.load_image(4), image)
        out = tmp_path / "predictions.jsonl"
        code = run_cli(["classify", str(image), "--weights", str(trained_model_dir), "--output", str(out)])
        assert code == 0
        (line,) = out.read_text().splitlines()
        assert json.loads(line)["path"] == str(image)

    def test_missing_weights(self, tiny_dataset, tmp_path) -> None:
        code = run_cli(["classify", "--weights", str(tmp_path / "none"), "--data", str(tiny_dataset.root)])
        assert code == 2


class TestTrainAndEval:
    """Tests for the train and eval commands on the tiny dataset."""

    def test_train(self, config_file, tmp_path) -> None:
        weights = tmp_path / "w"
        assert run_cli(["-q", "--config", str(config_file), "train", "--weights", str(weights)]) == 0
        assert (weights / "model.json").is_file()
        history = json.loads((weights / "history.json").read_text())
        assert set(history) == {"global", "address", "barcode", "fast_patch", "fusion"}

    def test_eval(self, config_file, tmp_path) -> None:
        reports = tmp_path / "r"
        assert run_cli(["-q", "--config", str(config_file), "eval", "--reports", str(reports), "--k", "2"]) == 0
        assert json.loads((reports / "report.json").read_text())["k"] == 2
        assert "Only global features" in (reports / "tables.txt").read_text()
