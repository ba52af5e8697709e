"""IC / LT cascade simulation and Monte-Carlo spread estimation."""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Sequence

import numpy as np

from . import _kernels as K
from .graph import WeightedGraph
from .rng import RngStream


class DiffusionModel(str, Enum):
    IC = "IC"
    LT = "LT"

    @property
    def code(self) -> int:
        return 0 if self is DiffusionModel.IC else 1


@dataclass(frozen=True)
class SpreadEstimate:
    mean: float
    sample_sd: float
    rounds: int

    @property
    def std_error(self) -> float:
        return self.sample_sd / math.sqrt(self.rounds)

    @classmethod
    def from_samples(cls, samples: Sequence[float] | np.ndarray) -> SpreadEstimate:
        x = np.asarray(samples, dtype=np.float64)
        return cls(float(x.mean()), sample_sd(x), len(x))

    def to_dict(self) -> dict:
        return {"mean": self.mean, "sample_sd": self.sample_sd, "rounds": self.rounds,
                "std_error": self.std_error}


def sample_sd(samples: Sequence[float] | np.ndarray) -> float:
    """Sample standard deviation with the ``r - 1`` denominator.

    Every sample counts; nothing is binned, smoothed or dropped as an outlier.
    """
    x = np.asarray(samples, dtype=np.float64)
    if len(x) < 2:
        raise ValueError("sample standard deviation needs at least 2 samples")
    return float(np.std(x, ddof=1))


def as_model(model: DiffusionModel | str) -> DiffusionModel:
    return model if isinstance(model, DiffusionModel) else DiffusionModel(str(model).upper())


def check_graph(g: WeightedGraph, model: DiffusionModel) -> None:
    g.require_weights()
    if model is DiffusionModel.LT and not g.is_lt_valid():
        raise ValueError("LT needs every node's incoming weights to sum to at most 1")


def check_seeds(g: WeightedGraph, seeds: Iterable[int]) -> np.ndarray:
    arr = np.fromiter((int(s) for s in seeds), dtype=np.int64)
    if len(arr) and (arr.min() < 0 or arr.max() >= g.node_count):
        bad = arr[(arr < 0) | (arr >= g.node_count)][0]
        raise ValueError(f"seed {bad} is not a node id of a {g.node_count}-node graph")
    if len(np.unique(arr)) != len(arr):
        raise ValueError("seeds must be distinct")
    return arr


def cascade_counts(g: WeightedGraph, model: DiffusionModel | str, seeds: np.ndarray, key: int,
                   first_round: int, rounds: int, live_edge: bool = False) -> np.ndarray:
    """Counts for rounds ``first_round ..`` of stream ``key``; no validation."""
    model = as_model(model)
    return K.cascade_counts(model.code, live_edge, g.node_count, g.out_ptr, g.dst, g.p,
                            g.in_ptr, g.in_order, g.in_p, seeds, np.uint64(key),
                            first_round, rounds)


def simulate_cascade(g: WeightedGraph, model: DiffusionModel | str, seeds: Iterable[int],
                     rng: RngStream) -> int:
    """Number of nodes active at the end of one cascade, seeds included.

    The cascade is the world keyed by ``rng``; it equals round ``i`` of
    ``estimate_spread(..., rng=parent)`` when ``rng == parent.child(i)``.
    """
    model = as_model(model)
    check_graph(g, model)
    arr = check_seeds(g, seeds)
    parent_key, index = _split(rng)
    return int(cascade_counts(g, model, arr, parent_key, index, 1)[0])


def _split(rng: RngStream) -> tuple[int, int]:
    if not rng.index:
        # a root stream is treated as child 0 of itself
        return rng.key, 0
    return RngStream(rng.seed, rng.index[:-1]).key, rng.index[-1]


def spread_samples(g: WeightedGraph, model: DiffusionModel | str, seeds: Iterable[int], rounds: int,
                   rng: RngStream, workers: int = 1) -> np.ndarray:
    """Per-round activated counts I_1(S), ..., I_r(S)."""
    model = as_model(model)
    check_graph(g, model)
    arr = check_seeds(g, seeds)
    if rounds < 1:
        raise ValueError("rounds must be positive")
    key = rng.key
    if workers <= 1 or rounds < 2 * workers:
        return cascade_counts(g, model, arr, key, 0, rounds)
    bounds = np.linspace(0, rounds, workers + 1).astype(int)
    with ThreadPoolExecutor(workers) as pool:
        parts = pool.map(lambda b: cascade_counts(g, model, arr, key, b[0], b[1] - b[0]),
                         zip(bounds[:-1], bounds[1:]))
        return np.concatenate(list(parts))


def estimate_spread(g: WeightedGraph, model: DiffusionModel | str, seeds: Iterable[int], rounds: int,
                    rng: RngStream, workers: int = 1) -> SpreadEstimate:
    """Monte-Carlo mean and sample standard deviation of the spread.

    Round ``i`` runs in world ``rng.child(i)``, so the estimate depends only
    on ``(graph, model, seeds, rounds, rng)`` and not on ``workers``.
    """
    if rounds < 2:
        raise ValueError("estimate_spread needs rounds >= 2 for a standard deviation")
    return SpreadEstimate.from_samples(spread_samples(g, model, seeds, rounds, rng, workers))


class WorldSpread:
    """Total activations over a fixed set of ``rounds`` sampled worlds.

    Every call reuses the same worlds (common random numbers), so the
    returned integer is a monotone submodular function of the seed set:
    a sum of reachability counts over live-edge graphs. LT uses the
    live-edge form for exactly that reason. Greedy, CELF and CELF++ built
    on one instance therefore make identical choices.
    """

    def __init__(self, g: WeightedGraph, model: DiffusionModel | str, rounds: int, rng: RngStream):
        self.g = g
        self.model = as_model(model)
        check_graph(g, self.model)
        if rounds < 1:
            raise ValueError("rounds must be positive")
        self.rounds = rounds
        self.key = rng.key
        self.calls = 0
        self._cache: dict[frozenset, int] = {}

    def total(self, seeds: Iterable[int]) -> int:
        s = frozenset(int(x) for x in seeds)
        if not s:
            return 0
        hit = self._cache.get(s)
        if hit is not None:
            return hit
        self.calls += 1
        arr = np.fromiter(sorted(s), dtype=np.int64)
        value = int(cascade_counts(self.g, self.model, arr, self.key, 0, self.rounds,
                                   live_edge=self.model is DiffusionModel.LT).sum())
        if len(self._cache) < 100_000:
            self._cache[s] = value
        return value

    def __call__(self, seeds: Iterable[int]) -> int:
        return self.total(seeds)

    def mean(self, seeds: Iterable[int]) -> float:
        return self.total(seeds) / self.rounds
