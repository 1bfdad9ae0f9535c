"""Byte-level encoders and decoders: PNM images and SLQI weight files."""

from shiplabel_qi.codec.pnm import read_pnm, write_pnm
from shiplabel_qi.codec.weights import (
    FUSION_BRANCH_ID,
    WeightFile,
    weights_from_bytes,
    weights_to_bytes,
)

__all__ = [
    "read_pnm",
    "write_pnm",
    "FUSION_BRANCH_ID",
    "WeightFile",
    "weights_from_bytes",
    "weights_to_bytes",
]
