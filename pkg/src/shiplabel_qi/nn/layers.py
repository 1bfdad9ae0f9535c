"""Layers with hand-written backward passes.

Activations are NHWC arrays. Every layer caches what its backward pass needs
during forward, and backward accumulates parameter gradients into `grads`
and returns the gradient with respect to the layer input.
"""

from __future__ import annotations

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from shiplabel_qi.core.errors import ShapeMismatch


class Layer:
    """Base layer: no parameters, identity."""

    def __init__(self) -> None:
        self.params: dict[str, np.ndarray] = {}
        self.grads: dict[str, np.ndarray] = {}

    def forward(self, x: np.ndarray) -> np.ndarray:
        return x

    def backward(self, grad: np.ndarray) -> np.ndarray:
        return grad

    def zero_grads(self) -> None:
        for name, value in self.params.items():
            self.grads[name] = np.zeros_like(value)

    def astype(self, dtype: type) -> None:
        """Cast parameters in place (float32 storage, float64 for checks)."""
        for name in self.params:
            self.params[name] = self.params[name].astype(dtype)
        self.zero_grads()

    def __repr__(self) -> str:
        shapes = ", ".join(f"{k}={v.shape}" for k, v in self.params.items())
        return f"{type(self).__name__}({shapes})"


class Conv3x3(Layer):
    """3x3 convolution, stride 1, zero padding 1; weight layout (3, 3, in, out)."""

    def __init__(self, in_channels: int, out_channels: int):
        super().__init__()
        self.in_channels = in_channels
        self.out_channels = out_channels
        self.params = {
            "weight": np.zeros((3, 3, in_channels, out_channels), dtype=np.float32),
            "bias": np.zeros(out_channels, dtype=np.float32),
        }
        self.zero_grads()
        self._cols: np.ndarray | None = None
        self._in_shape: tuple[int, ...] = ()

    def forward(self, x: np.ndarray) -> np.ndarray:
        if x.ndim != 4 or x.shape[3] != self.in_channels:
            raise ShapeMismatch(
                f"Conv3x3 expects (N, H, W, {self.in_channels}), got {x.shape}"
            )
        n, h, w, c = x.shape
        padded = np.pad(x, ((0, 0), (1, 1), (1, 1), (0, 0)))
        # (N, H, W, C, 3, 3) -> (N*H*W, 3*3*C) in (ky, kx, c) order
        windows = sliding_window_view(padded, (3, 3), axis=(1, 2))
        cols = windows.transpose(0, 1, 2, 4, 5, 3).reshape(n * h * w, 9 * c)
        self._cols = cols
        self._in_shape = x.shape
        weight = self.params["weight"].reshape(9 * c, self.out_channels)
        out = cols @ weight + self.params["bias"]
        return out.reshape(n, h, w, self.out_channels)

    def backward(self, grad: np.ndarray) -> np.ndarray:
        assert self._cols is not None
        n, h, w, c = self._in_shape
        g = grad.reshape(n * h * w, self.out_channels)
        self.grads["weight"] += (self._cols.T @ g).reshape(self.params["weight"].shape)
        self.grads["bias"] += g.sum(axis=0)
        weight = self.params["weight"].reshape(9 * c, self.out_channels)
        dcols = (g @ weight.T).reshape(n, h, w, 3, 3, c)
        dpadded = np.zeros((n, h + 2, w + 2, c), dtype=grad.dtype)
        for ky in range(3):
            for kx in range(3):
                dpadded[:, ky:ky + h, kx:kx + w, :] += dcols[:, :, :, ky, kx, :]
        return dpadded[:, 1:-1, 1:-1, :]


class ReLU(Layer):
    def __init__(self) -> None:
        super().__init__()
        self._mask: np.ndarray | None = None

    def forward(self, x: np.ndarray) -> np.ndarray:
        self._mask = x > 0
        return np.where(self._mask, x, 0).astype(x.dtype)

    def backward(self, grad: np.ndarray) -> np.ndarray:
        assert self._mask is not None
        return np.where(self._mask, grad, 0).astype(grad.dtype)


class MaxPool2(Layer):
    """2x2 max pooling, stride 2; odd trailing rows/columns are dropped."""

    def __init__(self) -> None:
        super().__init__()
        self._argmax: np.ndarray | None = None
        self._in_shape: tuple[int, ...] = ()

    def forward(self, x: np.ndarray) -> np.ndarray:
        n, h, w, c = x.shape
        h2, w2 = h // 2, w // 2
        if h2 == 0 or w2 == 0:
            raise ShapeMismatch(f"MaxPool2 input too small: {x.shape}")
        blocks = x[:, :h2 * 2, :w2 * 2, :].reshape(n, h2, 2, w2, 2, c)
        blocks = blocks.transpose(0, 1, 3, 5, 2, 4).reshape(n, h2, w2, c, 4)
        # First maximum in (dy, dx) row-major order gets the gradient
        self._argmax = blocks.argmax(axis=-1)
        self._in_shape = x.shape
        return np.take_along_axis(blocks, self._argmax[..., np.newaxis], axis=-1)[..., 0]

    def backward(self, grad: np.ndarray) -> np.ndarray:
        assert self._argmax is not None
        n, h, w, c = self._in_shape
        h2, w2 = h // 2, w // 2
        blocks = np.zeros((n, h2, w2, c, 4), dtype=grad.dtype)
        np.put_along_axis(blocks, self._argmax[..., np.newaxis], grad[..., np.newaxis], axis=-1)
        blocks = blocks.reshape(n, h2, w2, c, 2, 2).transpose(0, 1, 4, 2, 5, 3)
        out = np.zeros((n, h, w, c), dtype=grad.dtype)
        out[:, :h2 * 2, :w2 * 2, :] = blocks.reshape(n, h2 * 2, w2 * 2, c)
        return out


class GlobalAvgPool(Layer):
    """Mean over height and width: (N, H, W, C) -> (N, C)."""

    def __init__(self) -> None:
        super().__init__()
        self._in_shape: tuple[int, ...] = ()

    def forward(self, x: np.ndarray) -> np.ndarray:
        self._in_shape = x.shape
        return x.mean(axis=(1, 2))

    def backward(self, grad: np.ndarray) -> np.ndarray:
        n, h, w, c = self._in_shape
        spread = grad[:, np.newaxis, np.newaxis, :] / (h * w)
        return np.broadcast_to(spread, (n, h, w, c)).astype(grad.dtype)


class Dense(Layer):
    """Fully connected layer; weight layout (in, out)."""

    def __init__(self, in_features: int, out_features: int):
        super().__init__()
        self.in_features = in_features
        self.out_features = out_features
        self.params = {
            "weight": np.zeros((in_features, out_features), dtype=np.float32),
            "bias": np.zeros(out_features, dtype=np.float32),
        }
        self.zero_grads()
        self._x: np.ndarray | None = None

    def forward(self, x: np.ndarray) -> np.ndarray:
        if x.ndim != 2 or x.shape[1] != self.in_features:
            raise ShapeMismatch(
                f"Dense expects (N, {self.in_features}), got {x.shape}"
            )
        self._x = x
        return x @ self.params["weight"] + self.params["bias"]

    def backward(self, grad: np.ndarray) -> np.ndarray:
        assert self._x is not None
        self.grads["weight"] += self._x.T @ grad
        self.grads["bias"] += grad.sum(axis=0)
        return grad @ self.params["weight"].T
