"""Seeded random streams: splitmix64 seeding and xoshiro256** generation.

Both algorithms are defined on 64-bit integers only, so a stream produces the
same sequence on every platform and Python version. Bulk array noise (texture
fills) is drawn from a numpy PCG64 generator seeded from the stream.
"""

from __future__ import annotations

import math
from collections.abc import MutableSequence, Sequence
from typing import TypeVar

import numpy as np

MASK64 = (1 << 64) - 1
GOLDEN_GAMMA = 0x9E3779B97F4A7C15

T = TypeVar("T")


def mix64(z: int) -> int:
    """splitmix64 finalizer."""
    z &= MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def derive_seed(master_seed: int, index: int) -> int:
    """
    Seed of element `index` under master_seed.

    This is output number index+1 of a splitmix64 generator started at
    master_seed, so any element can be computed without the ones before it.
    """
    return mix64((master_seed + (index + 1) * GOLDEN_GAMMA) & MASK64)


class SplitMix64:
    """Sequential splitmix64 generator, used for seeding."""

    def __init__(self, seed: int):
        self.state = seed & MASK64

    def next(self) -> int:
        self.state = (self.state + GOLDEN_GAMMA) & MASK64
        return mix64(self.state)


def _rotl(x: int, k: int) -> int:
    return ((x << k) | (x >> (64 - k))) & MASK64


class Xoshiro256:
    """
    xoshiro256** stream with convenience draws.

    Example:
        >>> rng = Xoshiro256(42)
        >>> rng.randint(1, 6)
    """

    def __init__(self, seed: int):
        self.seed = seed & MASK64
        sm = SplitMix64(self.seed)
        self._s = [sm.next() for _ in range(4)]
        self._spare_normal: float | None = None

    def next_u64(self) -> int:
        s0, s1, s2, s3 = self._s
        result = (_rotl((s1 * 5) & MASK64, 7) * 9) & MASK64
        t = (s1 << 17) & MASK64
        s2 ^= s0
        s3 ^= s1
        s1 ^= s2
        s0 ^= s3
        s2 ^= t
        s3 = _rotl(s3, 45)
        self._s = [s0, s1, s2, s3]
        return result

    def fork(self, tag: int) -> Xoshiro256:
        """Independent child stream identified by tag."""
        return Xoshiro256(derive_seed(self.seed, tag))

    def random(self) -> float:
        """Uniform float in [0, 1) with 53 bits of precision."""
        return (self.next_u64() >> 11) * (1.0 / (1 << 53))

    def uniform(self, low: float, high: float) -> float:
        return low + (high - low) * self.random()

    def below(self, n: int) -> int:
        """Uniform integer in [0, n) without modulo bias."""
        if n <= 0:
            raise ValueError(f"below() needs n >= 1, got {n}")
        limit = (1 << 64) - ((1 << 64) % n)
        while True:
            x = self.next_u64()
            if x < limit:
                return x % n

    def randint(self, low: int, high: int) -> int:
        """Uniform integer in [low, high] inclusive."""
        if high < low:
            raise ValueError(f"randint() empty range [{low}, {high}]")
        return low + self.below(high - low + 1)

    def choice(self, items: Sequence[T]) -> T:
        if not items:
            raise ValueError("choice() from empty sequence")
        return items[self.below(len(items))]

    def shuffle(self, items: MutableSequence[T]) -> None:
        """Fisher-Yates shuffle in place."""
        for i in range(len(items) - 1, 0, -1):
            j = self.below(i + 1)
            items[i], items[j] = items[j], items[i]

    def permutation(self, n: int) -> list[int]:
        order = list(range(n))
        self.shuffle(order)
        return order

    def normal(self, mean: float = 0.0, std: float = 1.0) -> float:
        """Gaussian draw via Box-Muller (pairs are cached)."""
        if self._spare_normal is not None:
            z = self._spare_normal
            self._spare_normal = None
            return mean + std * z
        u1 = 1.0 - self.random()  # (0, 1]
        u2 = self.random()
        r = math.sqrt(-2.0 * math.log(u1))
        theta = 2.0 * math.pi * u2
        self._spare_normal = r * math.sin(theta)
        return mean + std * r * math.cos(theta)

    def normal_array(self, shape: tuple[int, ...], std: float) -> np.ndarray:
        """float64 array of Gaussian draws, filled in row-major order."""
        count = int(np.prod(shape)) if shape else 1
        values = [self.normal(0.0, std) for _ in range(count)]
        return np.asarray(values, dtype=np.float64).reshape(shape)

    def numpy_generator(self) -> np.random.Generator:
        """numpy generator for bulk noise, seeded from this stream."""
        return np.random.Generator(np.random.PCG64(self.next_u64()))
