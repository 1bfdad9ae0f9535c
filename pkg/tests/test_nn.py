"""Tests for the numpy CNN: loss, gradients, training, extractors and weight files."""

import math

import numpy as np
import pytest

from shiplabel_qi.core.errors import (
    ConfigError,
    EmptyDataset,
    IoFailure,
    LabelOutOfRange,
    ShapeMismatch,
    WeightFormatError,
)
from shiplabel_qi.core.raster import Raster
from shiplabel_qi.nn.extractor import (
    Branch,
    ExtractorParams,
    extract_features,
    forward_features,
    load_extractor,
    predict_branch,
    prepare_input,
    save_extractor,
    train_extractor,
)
from shiplabel_qi.nn import gradcheck
from shiplabel_qi.nn.gradcheck import gradient_check, gradient_check_report
from shiplabel_qi.nn.layers import Conv3x3, Dense, MaxPool2
from shiplabel_qi.nn.loss import batch_cross_entropy, softmax, softmax_cross_entropy
from shiplabel_qi.nn.train import TrainConfig, fit, predict_proba


def toy_squares(n: int, side: int = 16, seed: int = 0) -> tuple[np.ndarray, np.ndarray]:
    """Gray images holding a bright (class 0) or dark (class 1) square."""
    rng = np.random.default_rng(seed)
    x = np.full((n, side, side, 1), 0.5, dtype=np.float32)
    y = np.arange(n) % 2
    for i in range(n):
        top, left = rng.integers(0, side - 6, size=2)
        x[i, top:top + 6, left:left + 6, 0] = 1.0 if y[i] == 0 else 0.0
    return x, y


def small_params(seed: int = 3, side: int = 16) -> ExtractorParams:
    return ExtractorParams.create(Branch.GLOBAL, 8, side, seed)


class TestSoftmax:
    """Tests for softmax and cross-entropy."""

    def test_sums_to_one(self) -> None:
        rng = np.random.default_rng(0)
        logits = rng.normal(0, 10, size=(10000, 5))
        probs = softmax(logits)
        assert np.all(probs >= 0)
        assert np.allclose(probs.sum(axis=1), 1.0, atol=1e-12)

    def test_shift_invariance(self) -> None:
        logits = np.random.default_rng(1).normal(0, 5, size=(200, 5))
        probs = softmax(logits)
        for c in (-50.0, 3.5, 700.0):
            shifted = softmax(logits + c)
            assert np.allclose(shifted, probs, rtol=1e-9, atol=1e-12)
            assert np.array_equal(shifted.argmax(axis=1), probs.argmax(axis=1))

    def test_uniform_logits(self) -> None:
        loss, grad = softmax_cross_entropy(np.zeros(5), 1)
        assert loss == pytest.approx(math.log(5))
        assert grad.tolist() == pytest.approx([0.2, -0.8, 0.2, 0.2, 0.2])

    def test_gradient_sums_to_zero(self) -> None:
        _, grad = softmax_cross_entropy(np.array([1.0, -2.0, 0.5, 3.0, 0.0]), 3)
        assert grad.sum() == pytest.approx(0.0, abs=1e-12)

    def test_saturation(self) -> None:
        loss, grad = softmax_cross_entropy(np.array([1000.0, 0.0, 0.0, 0.0, 0.0]), 0)
        assert math.isfinite(loss)
        assert loss == pytest.approx(0.0, abs=1e-12)
        assert np.all(np.isfinite(grad))
        loss, _ = softmax_cross_entropy(np.array([1000.0, 0.0, 0.0, 0.0, 0.0]), 2)
        assert loss == pytest.approx(1000.0)

    def test_label_range(self) -> None:
        with pytest.raises(LabelOutOfRange):
            softmax_cross_entropy(np.zeros(5), 5)
        with pytest.raises(LabelOutOfRange):
            batch_cross_entropy(np.zeros((2, 5)), np.array([0, -1]))

    def test_batch_gradient_is_mean(self) -> None:
        logits = np.random.default_rng(1).normal(size=(4, 5))
        labels = np.array([0, 1, 2, 3])
        loss, grad = batch_cross_entropy(logits, labels)
        singles = [softmax_cross_entropy(logits[i], int(labels[i])) for i in range(4)]
        assert loss == pytest.approx(np.mean([s[0] for s in singles]))
        assert np.allclose(grad, np.stack([s[1] for s in singles]) / 4)


class TestLayers:
    """Shape checks of individual layers."""

    def test_conv_shape(self) -> None:
        conv = Conv3x3(2, 4)
        assert conv.forward(np.zeros((3, 7, 5, 2))).shape == (3, 7, 5, 4)
        with pytest.raises(ShapeMismatch):
            conv.forward(np.zeros((3, 7, 5, 1)))

    def test_maxpool_drops_odd_edge(self) -> None:
        pool = MaxPool2()
        x = np.arange(25, dtype=np.float64).reshape(1, 5, 5, 1)
        out = pool.forward(x)
        assert out[0, :, :, 0].tolist() == [[6.0, 8.0], [16.0, 18.0]]
        back = pool.backward(np.ones_like(out))
        assert back.sum() == 4.0
        assert back[0, 4, :, 0].sum() == 0.0

    def test_dense_shape(self) -> None:
        with pytest.raises(ShapeMismatch):
            Dense(3, 2).forward(np.zeros((1, 4)))


class TestGradientCheck:
    """Finite-difference verification of backpropagation."""

    def test_backprop_matches_numeric(self) -> None:
        params = small_params()
        sample = np.random.default_rng(2).random((16, 16, 1))
        assert gradient_check(params.classifier, sample, 3, samples=200) < 1e-4

    def test_detects_missing_weight_gradient(self, monkeypatch) -> None:
        original = Conv3x3.backward

        def broken(self, grad):
            saved = self.grads["weight"].copy()
            out = original(self, grad)
            self.grads["weight"] = saved
            return out

        monkeypatch.setattr(Conv3x3, "backward", broken)
        params = small_params()
        sample = np.random.default_rng(2).random((16, 16, 1))
        assert gradient_check(params.classifier, sample, 3, samples=200) > 0.5
        report = gradient_check_report(params.classifier, sample, 3, samples=200)
        assert report.compared == 200
        assert not report.passed()

    def test_weights_stuck_on_kinks_fail_the_check(self, monkeypatch) -> None:
        # Every draw looks like a kink, so no weight is ever compared
        monkeypatch.setattr(gradcheck, "KINK_ATOL", -1.0)
        monkeypatch.setattr(gradcheck, "MAX_REDRAWS", 2)
        params = small_params()
        sample = np.random.default_rng(2).random((16, 16, 1))
        report = gradient_check_report(params.classifier, sample, 3, samples=10)
        assert report.compared == 0
        assert report.dropped == 10
        assert report.redraws == 30
        assert not report.passed()
        assert gradient_check(params.classifier, sample, 3, samples=10) == math.inf

    def test_zero_network(self) -> None:
        params = small_params()
        net = params.classifier
        net.load_tensors([np.zeros_like(t) for t in net.tensors()])
        assert gradient_check(net, np.zeros((16, 16, 1)), 0) == 0.0

    def test_leaves_network_untouched(self) -> None:
        params = small_params()
        before = [t.copy() for t in params.classifier.tensors()]
        gradient_check(params.classifier, np.ones((16, 16, 1)), 1, samples=20)
        assert all(np.array_equal(a, b) for a, b in zip(before, params.classifier.tensors()))
        assert params.classifier.tensors()[0].dtype == np.float32


class TestTraining:
    """Tests for minibatch SGD."""

    def test_learns_toy_task(self) -> None:
        x, y = toy_squares(20)
        params = small_params()
        config = TrainConfig(epochs=200, batch_size=8, input_side=16)
        result = fit(params.classifier, x, y, config)
        assert len(result.history) == 200
        assert np.array_equal(predict_proba(params.classifier, x).argmax(axis=1), y)

    def test_loss_decreases_with_small_steps(self) -> None:
        x, y = toy_squares(20, seed=1)
        params = small_params(seed=5)
        config = TrainConfig(learning_rate=1e-3, momentum=0.0, epochs=5, batch_size=20, input_side=16)
        losses = fit(params.classifier, x, y, config).losses()
        assert all(b <= a for a, b in zip(losses, losses[1:]))

    def test_deterministic_weights(self) -> None:
        x, y = toy_squares(12)
        config = TrainConfig(epochs=3, batch_size=4, input_side=16, seed=9)
        a = train_extractor(Branch.ADDRESS, x, y, config, 8)
        b = train_extractor(Branch.ADDRESS, x, y, config, 8)
        assert a.to_bytes() == b.to_bytes()
        c = train_extractor(Branch.ADDRESS, x, y, config.with_seed(10), 8)
        assert c.to_bytes() != a.to_bytes()

    def test_empty_dataset(self) -> None:
        with pytest.raises(EmptyDataset):
            train_extractor(
                Branch.GLOBAL, np.zeros((0, 16, 16, 1)), np.zeros(0), TrainConfig(input_side=16), 8
            )

    def test_label_count_mismatch(self) -> None:
        x, _ = toy_squares(4)
        with pytest.raises(ShapeMismatch):
            fit(small_params().classifier, x, np.array([0, 1]), TrainConfig(input_side=16))

    def test_config_validation(self) -> None:
        with pytest.raises(ConfigError):
            TrainConfig(learning_rate=0)
        with pytest.raises(ConfigError):
            TrainConfig(momentum=1.0)
        with pytest.raises(ConfigError):
            TrainConfig(input_side=4)
        with pytest.raises(ConfigError):
            TrainConfig.from_dict({"epochs": 3, "optimizer": "adam"})

    def test_config_round_trip(self) -> None:
        config = TrainConfig().with_epochs(7).with_learning_rate(0.005).with_batch_size(4)
        assert TrainConfig.from_dict(config.to_dict()) == config

    def test_patch_order_does_not_change_gradient(self) -> None:
        rng = np.random.default_rng(6)
        patches = rng.random((3, 16, 16, 1))
        labels = np.array([2, 2, 2])

        def gradients(order: list[int]) -> list[np.ndarray]:
            net = small_params().classifier.astype(np.float64)
            net.zero_grads()
            logits = net.forward(patches[order])
            _, grad = batch_cross_entropy(logits, labels)
            net.backward(grad)
            return [layer.grads[key].copy() for _, layer, key in net.named_parameters()]

        for a, b in zip(gradients([0, 1, 2]), gradients([2, 0, 1])):
            assert np.allclose(a, b, atol=1e-12)


class TestExtractor:
    """Tests for branch feature extractors."""

    def test_feature_shape_and_determinism(self) -> None:
        params = small_params()
        image = Raster.from_array(np.random.default_rng(0).integers(0, 256, (40, 70), dtype=np.uint8))
        a = forward_features(params, image)
        b = forward_features(params, image)
        assert a.values.shape == (8,)
        assert np.array_equal(a.values, b.values)
        assert a.branch is Branch.GLOBAL

    def test_zero_weights_give_zero_features(self) -> None:
        params = small_params()
        params.classifier.load_tensors([np.zeros_like(t) for t in params.classifier.tensors()])
        assert not forward_features(params, np.random.default_rng(0).random((16, 16, 1))).values.any()

    def test_wrong_input_shape(self) -> None:
        with pytest.raises(ShapeMismatch):
            forward_features(small_params(), np.zeros((32, 32, 1)))

    def test_prepare_input(self) -> None:
        x = prepare_input(Raster.blank(100, 50, 3, 0), 16)
        assert x.shape == (16, 16, 1)
        assert x.dtype == np.float32
        assert x[0, 0, 0] == 1.0
        assert x[8, 8, 0] == 0.0

    def test_patch_batches(self) -> None:
        params = small_params()
        patches = np.random.default_rng(1).random((2, 3, 16, 16, 1)).astype(np.float32)
        feats = extract_features(params, patches)
        assert feats.shape == (2, 3, 8)
        assert np.allclose(feats[1, 2], forward_features(params, patches[1, 2]).values, atol=1e-6)
        probs = predict_branch(params, patches)
        assert probs.shape == (2, 5)
        assert np.allclose(probs.sum(axis=1), 1.0, atol=1e-5)

    def test_fast_patch_samples(self) -> None:
        x, y = toy_squares(4)
        stacked = np.stack([x, x, x], axis=1)
        params = train_extractor(Branch.FAST_PATCH, stacked, y, TrainConfig(epochs=1, input_side=16), 8)
        assert params.branch is Branch.FAST_PATCH
        assert params.history is not None
        assert len(params.history.history) == 1


class TestWeightFiles:
    """Tests for extractor weight containers."""

    def test_round_trip(self, tmp_path) -> None:
        params = small_params()
        save_extractor(params, tmp_path / "global.slqi")
        loaded = load_extractor(tmp_path / "global.slqi")
        assert loaded.to_bytes() == params.to_bytes()
        sample = np.random.default_rng(3).random((16, 16, 1))
        assert np.array_equal(forward_features(loaded, sample).values, forward_features(params, sample).values)

    def test_header(self) -> None:
        data = small_params().to_bytes()
        assert data[:4] == b"SLQI"
        assert int.from_bytes(data[4:6], "little") == 1
        assert data[6] == int(Branch.GLOBAL)

    def test_bad_magic(self) -> None:
        data = small_params().to_bytes()
        with pytest.raises(WeightFormatError):
            ExtractorParams.from_bytes(b"XXXX" + data[4:])

    def test_truncated(self) -> None:
        data = small_params().to_bytes()
        with pytest.raises(WeightFormatError):
            ExtractorParams.from_bytes(data[:-3])

    def test_trailing_bytes(self) -> None:
        with pytest.raises(WeightFormatError):
            ExtractorParams.from_bytes(small_params().to_bytes() + b"\x00")

    def test_unsupported_version(self) -> None:
        data = bytearray(small_params().to_bytes())
        data[4:6] = (2).to_bytes(2, "little")
        with pytest.raises(WeightFormatError):
            ExtractorParams.from_bytes(bytes(data))

    def test_missing_file(self, tmp_path) -> None:
        with pytest.raises(IoFailure):
            load_extractor(tmp_path / "nope.slqi")
