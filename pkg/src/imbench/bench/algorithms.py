"""Uniform adapters so real and synthetic algorithms can be swept alike.

An adapter has a ``name`` and ``select(g, model, k, param, rng)`` returning
``(SeedSet, SelectionStats)``. What ``param`` means is up to the adapter:
rounds for the greedy family, epsilon for IMM/TIM+, theta for fixed RIS.
"""
from __future__ import annotations

import zlib
from dataclasses import dataclass, field
from typing import Callable, Mapping, Protocol, Sequence

from .. import algorithms as alg
from ..diffusion import SpreadEstimate, estimate_spread
from ..rng import RngStream


class BenchAlgorithm(Protocol):
    name: str

    def select(self, g, model, k: int, param, rng: RngStream): ...


@dataclass(frozen=True)
class RealAlgorithm:
    """A library algorithm behind the adapter interface."""

    name: str
    run: Callable = field(repr=False)

    def select(self, g, model, k, param, rng):
        return self.run(g, model, k, param, rng)

    def evaluate(self, g, model, seeds, param, rounds: int, rng: RngStream) -> SpreadEstimate:
        return estimate_spread(g, model, seeds, rounds, rng)


def _greedy(fn):
    return lambda g, model, k, param, rng: fn(g, model, k, int(param), rng)


def _ris(policy):
    def run(g, model, k, param, rng):
        seeds, _, stats = alg.ris_select(g, model, k, policy(param), rng)
        return seeds, stats
    return run


def _plain(fn):
    def run(g, model, k, param, rng):
        return fn(g, k, rng) if fn is alg.random_select else fn(g, k), alg.SelectionStats()
    return run


_REGISTRY: dict[str, Callable] = {
    "greedy": _greedy(alg.greedy_mc),
    "celf": _greedy(alg.celf),
    "celf++": _greedy(alg.celfpp),
    "imm": _ris(lambda eps: alg.Imm(float(eps))),
    "timplus": _ris(lambda eps: alg.TimPlus(float(eps))),
    "ris": _ris(lambda theta: alg.Fixed(int(theta))),
    "random": _plain(alg.random_select),
    "degree": _plain(alg.degree_select),
}

ALGORITHM_NAMES = tuple(_REGISTRY)


def real_algorithm(name: str) -> RealAlgorithm:
    try:
        return RealAlgorithm(name, _REGISTRY[name.lower()])
    except KeyError:
        raise ValueError(f"unknown algorithm {name!r}; choose from {', '.join(_REGISTRY)}") from None


@dataclass(frozen=True)
class FixedSeeds:
    """Always returns the same seeds; used to study one seed set's estimate."""

    nodes: tuple[int, ...]
    name: str = "fixed-seeds"

    def select(self, g, model, k, param, rng):
        return alg.SeedSet(tuple(self.nodes), len(self.nodes)), alg.SelectionStats()

    def evaluate(self, g, model, seeds, param, rounds, rng):
        return estimate_spread(g, model, seeds, rounds, rng)


@dataclass(frozen=True)
class MockAlgorithm:
    """A synthetic algorithm with a declared tradeoff curve.

    ``curve`` maps parameter -> (time, true spread). Runs report the
    declared time and evaluations report the declared spread with sample
    sd ``sd``. With ``noise > 0`` the time is scaled by ``1 + noise * z``
    and the mean shifted by ``noise * sd * z'`` with z, z' standard normal
    drawn from the run's stream and the algorithm name, so two mocks with
    the same curve but different names have independent noise.
    """

    name: str
    curve: Mapping[float, tuple[float, float]]
    sd: float = 0.0
    noise: float = 0.0
    declares_time = True

    def __post_init__(self):
        if not self.curve:
            raise ValueError("a mock needs at least one curve point")
        object.__setattr__(self, "curve", {float(p): (float(t), float(s))
                                           for p, (t, s) in self.curve.items()})
        if self.sd < 0 or self.noise < 0:
            raise ValueError("sd and noise must be non-negative")

    @classmethod
    def from_points(cls, name: str, points: Sequence[tuple[float, float]], sd: float = 0.0,
                    noise: float = 0.0) -> MockAlgorithm:
        """Curve from (time, spread) pairs; the parameter is the point index."""
        return cls(name, {i: tp for i, tp in enumerate(points)}, sd, noise)

    @property
    def grid(self) -> list[float]:
        return sorted(self.curve)

    def _z(self, rng: RngStream, which: int) -> float:
        stream = rng.child(zlib.crc32(self.name.encode()))
        return float(stream.child(which).generator().standard_normal())

    def time(self, param, rng: RngStream) -> float:
        t = self.curve[float(param)][0]
        if self.noise:
            t = max(t * (1.0 + self.noise * self._z(rng, 0)), 0.0)
        return t

    def select(self, g, model, k, param, rng):
        stats = alg.SelectionStats(wall_time=self.time(param, rng))
        return alg.SeedSet((), 0, info={"param": float(param)}), stats

    def evaluate(self, g, model, seeds, param, rounds: int, rng: RngStream) -> SpreadEstimate:
        mean = self.curve[float(param)][1]
        if self.noise:
            mean += self.noise * self.sd * self._z(rng, 1)
        return SpreadEstimate(mean, self.sd, rounds)


def flip_pair() -> tuple[MockAlgorithm, MockAlgorithm]:
    """A pair on times 2^0 .. 2^14 s whose ranking flips under per-algorithm bars.

    A climbs from 500 to 1400 over 2^0 .. 2^13 s and reaches 1600 at
    2^14 s; B climbs from 400 to 600. Both have sd 200. A dominates B, yet
    A's own bar (1600 - 200) needs 2^13 s while B's (600 - 200) needs 1 s.
    """
    a = {j: (2.0 ** j, 500.0 + j * 900.0 / 13.0) for j in range(14)}
    a[14] = (2.0 ** 14, 1600.0)
    b = {j: (2.0 ** j, 400.0 + 200.0 * j / 14.0) for j in range(15)}
    return MockAlgorithm("A", a, sd=200.0), MockAlgorithm("B", b, sd=200.0)


def speedup_pair() -> tuple[MockAlgorithm, MockAlgorithm]:
    """Times in minutes: A reaches spread 100 in 0.1 and 1000 in 10; B reaches 100 in 1."""
    return (MockAlgorithm.from_points("A", [(0.1, 100.0), (10.0, 1000.0)]),
            MockAlgorithm.from_points("B", [(1.0, 100.0)]))


def mock_from_dict(d: dict) -> MockAlgorithm:
    points = d["points"]
    return MockAlgorithm.from_points(d["name"], [tuple(p) for p in points],
                                     float(d.get("sd", 0.0)), float(d.get("noise", 0.0)))


def selection_cost(stats: alg.SelectionStats) -> float:
    """Deterministic work measure of one selection run."""
    return float(stats.evaluations + stats.lookahead_evaluations + stats.rr_slots)


def is_mock(a) -> bool:
    return getattr(a, "declares_time", False)

