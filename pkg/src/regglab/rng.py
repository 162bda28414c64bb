"""Counter-based splittable randomness.

Every sampler in the toolkit draws from a SplitMix64-style stream that is a
pure function of (base_seed, stream_index, draw counter).  Streams indexed by
trial number are independent, so Monte Carlo loops parallelise with no shared
state, and a sample is reproducible bit-for-bit from its SeedSpec alone.  The
compiled kernels implement the identical mixing function, so the pure-Python
and compiled backends consume the same draws in the same order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

_MASK = (1 << 64) - 1
GAMMA = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB


def mix64(z: int) -> int:
    """SplitMix64 finaliser: a bijective scramble of a 64-bit word."""
    z &= _MASK
    z = ((z ^ (z >> 30)) * _MIX1) & _MASK
    z = ((z ^ (z >> 27)) * _MIX2) & _MASK
    return z ^ (z >> 31)


@dataclass(frozen=True)
class SeedSpec:
    """(base_seed, stream_index) fully determines every draw of a stream."""

    base_seed: int
    stream_index: int = 0

    def stream_seed(self) -> int:
        return mix64((self.base_seed & _MASK) ^ mix64((self.stream_index + GAMMA) & _MASK))

    def child(self, k: int) -> "SeedSpec":
        """Derived stream for sub-experiment k of this seed."""
        return SeedSpec(self.base_seed, mix64((self.stream_index ^ mix64(k)) & _MASK))

    def to_dict(self) -> dict:
        return {"base_seed": self.base_seed, "stream_index": self.stream_index}


class Stream:
    """Sequential view of the counter-based stream for a SeedSpec.

    value(i) = mix64(seed + i * GAMMA), so blocks of draws can also be
    produced vectorised without touching scalar state.
    """

    __slots__ = ("seed", "counter")

    def __init__(self, spec: SeedSpec):
        self.seed = spec.stream_seed()
        self.counter = 0

    def next_u64(self) -> int:
        self.counter += 1
        return mix64((self.seed + self.counter * GAMMA) & _MASK)

    def u64_block(self, k: int) -> np.ndarray:
        idx = np.arange(self.counter + 1, self.counter + k + 1, dtype=np.uint64)
        self.counter += k
        z = (np.uint64(self.seed) + idx * np.uint64(GAMMA))
        z = (z ^ (z >> np.uint64(30))) * np.uint64(_MIX1)
        z = (z ^ (z >> np.uint64(27))) * np.uint64(_MIX2)
        return z ^ (z >> np.uint64(31))

    def randbelow(self, k: int) -> int:
        """Uniform integer in [0, k) with rejection: exactly uniform."""
        if k <= 0:
            raise ValueError("randbelow needs k >= 1")
        t = ((1 << 64) - k) % k  # 2^64 mod k
        while True:
            z = self.next_u64()
            if z >= t:
                return z % k

    def shuffle(self, seq: list) -> None:
        """In-place Fisher-Yates."""
        for i in range(len(seq) - 1, 0, -1):
            j = self.randbelow(i + 1)
            seq[i], seq[j] = seq[j], seq[i]

    def uniforms(self, k: int) -> np.ndarray:
        """k doubles in (0, 1], vectorised."""
        z = self.u64_block(k)
        return ((z >> np.uint64(11)).astype(np.float64) + 1.0) * (2.0 ** -53)

    def normals(self, k: int) -> np.ndarray:
        """k standard normals via Box-Muller (always consumes 2*ceil(k/2) draws)."""
        half = (k + 1) // 2
        u1 = self.uniforms(half)
        u2 = self.uniforms(half)
        r = np.sqrt(-2.0 * np.log(u1))
        out = np.empty(2 * half)
        out[0::2] = r * np.cos(2.0 * math.pi * u2)
        out[1::2] = r * np.sin(2.0 * math.pi * u2)
        return out[:k]
