"""Feature dimensions and head widths of the fusion stage."""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Any

from shiplabel_qi.core.errors import ConfigError
from shiplabel_qi.core.serial import check_keys
from shiplabel_qi.nn.extractor import Branch

PATCH_POOLINGS = ("mean",)


@dataclass(frozen=True)
class FusionConfig:
    """
    Branch feature sizes and the two hidden widths of the stacked head.

    The head is concat -> hidden[0] -> hidden[1] -> 5 with
    concat = global_dim + 3 * local_dim (address, barcode, pooled FAST).

    Example:
        >>> FusionConfig.full_scale().concat_dim
        3584
    """
    global_dim: int = 64
    local_dim: int = 16
    hidden: tuple[int, int] = (64, 32)
    patch_pooling: str = "mean"

    def __post_init__(self) -> None:
        if self.global_dim < 1 or self.local_dim < 1:
            raise ConfigError(
                f"Feature dims must be >= 1, got global={self.global_dim} local={self.local_dim}"
            )
        if len(self.hidden) != 2 or min(self.hidden) < 1:
            raise ConfigError(f"hidden must be two widths >= 1, got {self.hidden}")
        if self.patch_pooling not in PATCH_POOLINGS:
            raise ConfigError(f"patch_pooling must be one of {PATCH_POOLINGS}")

    @classmethod
    def desk_scale(cls) -> FusionConfig:
        return cls()

    @classmethod
    def full_scale(cls) -> FusionConfig:
        """2048-d global and 512-d local features, 512/128 hidden widths."""
        return cls(global_dim=2048, local_dim=512, hidden=(512, 128))

    @property
    def concat_dim(self) -> int:
        return self.global_dim + 3 * self.local_dim

    def branch_dim(self, branch: Branch) -> int:
        return self.global_dim if Branch(branch) is Branch.GLOBAL else self.local_dim

    def with_dims(self, global_dim: int, local_dim: int) -> FusionConfig:
        return replace(self, global_dim=global_dim, local_dim=local_dim)

    def with_hidden(self, first: int, second: int) -> FusionConfig:
        return replace(self, hidden=(first, second))

    def to_dict(self) -> dict[str, Any]:
        return {
            "global_dim": self.global_dim,
            "local_dim": self.local_dim,
            "hidden": list(self.hidden),
            "patch_pooling": self.patch_pooling,
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> FusionConfig:
        check_keys(cls, data)
        defaults = cls()
        hidden = data.get("hidden", defaults.hidden)
        return cls(
            global_dim=int(data.get("global_dim", defaults.global_dim)),
            local_dim=int(data.get("local_dim", defaults.local_dim)),
            hidden=tuple(int(h) for h in hidden),  # type: ignore[arg-type]
            patch_pooling=str(data.get("patch_pooling", defaults.patch_pooling)),
        )
