"""Counter-based random streams.

Every random draw in the package is a pure function of ``(key, counter)``
where ``key`` is derived from a master seed and a path of stream indices.
Round ``i`` of a Monte-Carlo estimate, or RR-set ``j`` of a sample, reads
from ``stream.child(i)``, so results never depend on evaluation order or
on how work is split between workers.

The mixing function is the SplitMix64 finalizer. The same arithmetic is
implemented in the numba kernels (:mod:`imbench._kernels`); the two must
stay bit-identical.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15
MIX1 = 0xBF58476D1CE4E5B9
MIX2 = 0x94D049BB133111EB


def mix64(z: int) -> int:
    z &= MASK64
    z = ((z ^ (z >> 30)) * MIX1) & MASK64
    z = ((z ^ (z >> 27)) * MIX2) & MASK64
    return z ^ (z >> 31)


def derive_key(key: int, index: int) -> int:
    """Key of child stream ``index`` of the stream with key ``key``."""
    return mix64(key ^ mix64((index * GOLDEN + MIX2) & MASK64))


def uniform(key: int, counter: int) -> float:
    """The ``counter``-th uniform draw in [0, 1) of stream ``key``."""
    x = mix64((key + (counter + 1) * GOLDEN) & MASK64)
    return (x >> 11) * (1.0 / 9007199254740992.0)


@dataclass(frozen=True)
class RngStream:
    """A reproducible random stream identified by ``(seed, index path)``."""

    seed: int
    index: tuple[int, ...] = ()

    def __post_init__(self):
        if not 0 <= self.seed <= MASK64:
            raise ValueError(f"seed must fit in 64 unsigned bits, got {self.seed}")
        object.__setattr__(self, "index", tuple(int(i) for i in self.index))

    @property
    def key(self) -> int:
        key = mix64(self.seed)
        for i in self.index:
            key = derive_key(key, i)
        return key

    def child(self, i: int) -> RngStream:
        if i < 0:
            raise ValueError("stream index must be non-negative")
        return RngStream(self.seed, self.index + (i,))

    def generator(self) -> np.random.Generator:
        """A numpy Generator for draws outside the numba kernels."""
        return np.random.Generator(np.random.Philox(key=self.key))

    def uniform(self, counter: int) -> float:
        return uniform(self.key, counter)

    def to_dict(self) -> dict:
        return {"seed": self.seed, "index": list(self.index)}

    @classmethod
    def from_dict(cls, d: dict) -> RngStream:
        return cls(int(d["seed"]), tuple(d.get("index", ())))


def fresh_seed() -> int:
    """A random 63-bit master seed, for commands run without ``--seed``."""
    return int(np.random.SeedSequence().generate_state(1, dtype=np.uint64)[0] >> 1)
