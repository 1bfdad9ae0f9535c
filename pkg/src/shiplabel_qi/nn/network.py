"""Sequential networks and their parameter initialization."""

from __future__ import annotations

import math
from collections.abc import Iterator

import numpy as np

from shiplabel_qi.core.errors import WeightFormatError
from shiplabel_qi.core.rng import Xoshiro256
from shiplabel_qi.nn.layers import Conv3x3, Dense, Layer


class Sequential:
    """
    An ordered stack of layers.

    Parameters are visited in a fixed order (layer order, then weight before
    bias), which is the order used for initialization, optimization and the
    weight file.
    """

    def __init__(self, layers: list[Layer]):
        self.layers = layers

    def __call__(self, x: np.ndarray) -> np.ndarray:
        return self.forward(x)

    def forward(self, x: np.ndarray) -> np.ndarray:
        for layer in self.layers:
            x = layer.forward(x)
        return x

    def backward(self, grad: np.ndarray) -> np.ndarray:
        for layer in reversed(self.layers):
            grad = layer.backward(grad)
        return grad

    def zero_grads(self) -> None:
        for layer in self.layers:
            layer.zero_grads()

    def named_parameters(self) -> Iterator[tuple[str, Layer, str]]:
        """(qualified name, layer, key) for every parameter array."""
        for i, layer in enumerate(self.layers):
            for key in sorted(layer.params, key=lambda k: k != "weight"):
                yield f"{i}.{type(layer).__name__.lower()}.{key}", layer, key

    def tensors(self) -> list[np.ndarray]:
        return [layer.params[key] for _, layer, key in self.named_parameters()]

    def tensor_names(self) -> list[str]:
        return [name for name, _, _ in self.named_parameters()]

    def load_tensors(self, tensors: list[np.ndarray]) -> None:
        """Replace parameters in named_parameters order."""
        slots = list(self.named_parameters())
        if len(slots) != len(tensors):
            raise WeightFormatError(f"Expected {len(slots)} tensors, got {len(tensors)}")
        for (name, layer, key), tensor in zip(slots, tensors):
            if layer.params[key].shape != tensor.shape:
                raise WeightFormatError(
                    f"Tensor {name} has shape {tensor.shape}, expected {layer.params[key].shape}"
                )
            layer.params[key] = np.array(tensor, dtype=layer.params[key].dtype)
        self.zero_grads()

    def astype(self, dtype: type) -> Sequential:
        for layer in self.layers:
            layer.astype(dtype)
        return self

    def all_finite(self) -> bool:
        return all(bool(np.isfinite(t).all()) for t in self.tensors())

    @property
    def parameter_count(self) -> int:
        return sum(t.size for t in self.tensors())


def he_init(network: Sequential, rng: Xoshiro256) -> Sequential:
    """
    Weights ~ Normal(0, sqrt(2 / fan_in)), biases zero.

    Draws come from rng in named_parameters order.
    """
    for _, layer, key in network.named_parameters():
        param = layer.params[key]
        if key == "bias":
            layer.params[key] = np.zeros_like(param)
            continue
        if isinstance(layer, Conv3x3):
            fan_in = 9 * layer.in_channels
        elif isinstance(layer, Dense):
            fan_in = layer.in_features
        else:
            fan_in = int(np.prod(param.shape[:-1]))
        std = math.sqrt(2.0 / fan_in)
        layer.params[key] = rng.normal_array(param.shape, std).astype(param.dtype)
    network.zero_grads()
    return network
