"""SLQI weight container.

Layout (all integers little-endian)::

    "SLQI"                 magic, 4 bytes
    version                u16
    branch id              u8   (255 = fusion head)
    tensor count           u16
    per tensor:            u8 rank, then rank x u32 extents
    metadata length        u32
    metadata               canonical JSON, UTF-8
    payload                f32 values of every tensor, in table order

Identical tensors and metadata always encode to identical bytes.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from shiplabel_qi.core.errors import WeightFormatError
from shiplabel_qi.core.serial import canonical_json

WEIGHTS_MAGIC = b"SLQI"
WEIGHTS_VERSION = 1
FUSION_BRANCH_ID = 255


@dataclass
class WeightFile:
    """Decoded container: branch id, float32 tensors and metadata."""
    branch: int
    tensors: list[np.ndarray]
    meta: dict[str, Any] = field(default_factory=dict)
    version: int = WEIGHTS_VERSION


def weights_to_bytes(weights: WeightFile) -> bytes:
    """Serialize a weight file."""
    if not 0 <= weights.branch <= 255:
        raise WeightFormatError(f"Branch id must fit in a byte, got {weights.branch}")
    data = bytearray(WEIGHTS_MAGIC)
    data.extend(weights.version.to_bytes(2, "little"))
    data.append(weights.branch)
    data.extend(len(weights.tensors).to_bytes(2, "little"))

    for tensor in weights.tensors:
        data.append(tensor.ndim)
        for extent in tensor.shape:
            data.extend(int(extent).to_bytes(4, "little"))

    meta = canonical_json(weights.meta).encode("utf-8")
    data.extend(len(meta).to_bytes(4, "little"))
    data.extend(meta)

    for tensor in weights.tensors:
        data.extend(np.ascontiguousarray(tensor, dtype="<f4").tobytes())
    return bytes(data)


def _take(data: bytes, pos: int, size: int) -> tuple[bytes, int]:
    if pos + size > len(data):
        raise WeightFormatError("Weight file is truncated")
    return data[pos:pos + size], pos + size


def weights_from_bytes(data: bytes) -> WeightFile:
    """
    Parse a weight file.

    Raises:
        WeightFormatError: bad magic, unsupported version or truncated data
    """
    if data[:4] != WEIGHTS_MAGIC:
        raise WeightFormatError(f"Not an SLQI weight file (magic {data[:4]!r})")
    pos = 4
    raw, pos = _take(data, pos, 2)
    version = int.from_bytes(raw, "little")
    if version != WEIGHTS_VERSION:
        raise WeightFormatError(f"Unsupported weight file version {version}")
    raw, pos = _take(data, pos, 1)
    branch = raw[0]
    raw, pos = _take(data, pos, 2)
    count = int.from_bytes(raw, "little")

    shapes = []
    for _ in range(count):
        raw, pos = _take(data, pos, 1)
        rank = raw[0]
        raw, pos = _take(data, pos, 4 * rank)
        shapes.append(tuple(int.from_bytes(raw[i:i + 4], "little") for i in range(0, 4 * rank, 4)))

    raw, pos = _take(data, pos, 4)
    meta_len = int.from_bytes(raw, "little")
    raw, pos = _take(data, pos, meta_len)
    try:
        meta = json.loads(raw.decode("utf-8"))
    except ValueError as e:
        raise WeightFormatError(f"Weight file metadata is not JSON: {e}") from e

    tensors = []
    for shape in shapes:
        size = int(np.prod(shape)) if shape else 1
        raw, pos = _take(data, pos, 4 * size)
        tensors.append(np.frombuffer(raw, dtype="<f4").astype(np.float32).reshape(shape))
    if pos != len(data):
        raise WeightFormatError(f"{len(data) - pos} unexpected trailing bytes in weight file")
    return WeightFile(branch=branch, tensors=tensors, meta=meta, version=version)
