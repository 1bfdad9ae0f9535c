"""Concatenation of branch features into the fused vector."""

from __future__ import annotations

from collections.abc import Sequence

import numpy as np

from shiplabel_qi.core.errors import DimMismatch, WrongPatchCount
from shiplabel_qi.fusion.config import FusionConfig
from shiplabel_qi.nn.extractor import Branch, FeatureVector


def _check(vector: FeatureVector, branch: Branch, config: FusionConfig) -> np.ndarray:
    expected = config.branch_dim(branch)
    values = np.asarray(vector.values).reshape(-1)
    if values.shape[0] != expected:
        raise DimMismatch(
            f"{branch.label} feature has length {values.shape[0]}, expected {expected}"
        )
    return values


def pool_patches(patches: np.ndarray) -> np.ndarray:
    """Element-wise mean over the patch axis (second to last)."""
    return patches.mean(axis=-2)


def fuse_features(
    global_feature: FeatureVector,
    address: FeatureVector,
    barcode: FeatureVector,
    fast_patches: Sequence[FeatureVector],
    config: FusionConfig | None = None,
    n_p: int = 3,
) -> FeatureVector:
    """
    [global | address | barcode | mean of FAST patches].

    Raises:
        DimMismatch: a vector does not have its branch's configured length
        WrongPatchCount: len(fast_patches) != n_p
    """
    config = config or FusionConfig()
    if len(fast_patches) != n_p:
        raise WrongPatchCount(f"Expected {n_p} FAST patch features, got {len(fast_patches)}")
    parts = [
        _check(global_feature, Branch.GLOBAL, config),
        _check(address, Branch.ADDRESS, config),
        _check(barcode, Branch.BARCODE, config),
        pool_patches(np.stack([_check(p, Branch.FAST_PATCH, config) for p in fast_patches])),
    ]
    return FeatureVector(Branch.FUSION, np.concatenate(parts))


def fuse_batch(
    global_features: np.ndarray,
    address: np.ndarray,
    barcode: np.ndarray,
    fast_patches: np.ndarray,
    config: FusionConfig | None = None,
    n_p: int = 3,
) -> np.ndarray:
    """Batched fuse_features on (N, dim) arrays and (N, n_p, local_dim) patches."""
    config = config or FusionConfig()
    n = global_features.shape[0]
    expected = {
        "global": (global_features, (n, config.global_dim)),
        "address": (address, (n, config.local_dim)),
        "barcode": (barcode, (n, config.local_dim)),
    }
    for name, (array, shape) in expected.items():
        if array.shape != shape:
            raise DimMismatch(f"{name} features have shape {array.shape}, expected {shape}")
    if fast_patches.ndim != 3 or fast_patches.shape[0] != n or fast_patches.shape[2] != config.local_dim:
        raise DimMismatch(
            f"FAST patch features have shape {fast_patches.shape}, expected ({n}, {n_p}, {config.local_dim})"
        )
    if fast_patches.shape[1] != n_p:
        raise WrongPatchCount(f"Expected {n_p} FAST patch features, got {fast_patches.shape[1]}")
    return np.concatenate(
        [global_features, address, barcode, pool_patches(fast_patches)], axis=1
    )
