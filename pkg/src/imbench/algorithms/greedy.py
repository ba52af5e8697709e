"""Greedy hill climbing with Monte-Carlo spread, plus CELF and CELF++.

All three take the same spread objective. With the default objective,
``WorldSpread``, the spread of every candidate set is measured on one
fixed collection of sampled worlds, which makes the estimate exactly
submodular. The lazy variants then pick exactly what plain greedy picks;
they only skip marginal-gain computations.

Ties go to the lower node id everywhere.
"""
from __future__ import annotations

import heapq
import time
from typing import Callable, Iterable

from ..diffusion import DiffusionModel, WorldSpread
from ..graph import WeightedGraph
from ..rng import RngStream
from .common import SeedSet, SelectionStats, check_k

Objective = Callable[[Iterable[int]], float]


class _Counted:
    def __init__(self, spread: Objective, stats: SelectionStats):
        self.spread, self.stats = spread, stats
        self._last: tuple[frozenset, float] | None = None

    def __call__(self, seeds) -> float:
        key = frozenset(seeds)
        if self._last is not None and self._last[0] == key:
            return self._last[1]
        self.stats.spread_calls += 1
        value = self.spread(key)
        self._last = (key, value)
        return value


def greedy_select(n: int, k: int, spread: Objective, stats: SelectionStats | None = None,
                  scale: float = 1.0) -> tuple[SeedSet, SelectionStats]:
    """Plain greedy: every remaining node's gain is recomputed each iteration."""
    check_k(k, n)
    stats = stats or SelectionStats()
    f = _Counted(spread, stats)
    seeds: list[int] = []
    chosen = set()
    gains = []
    base = 0.0
    for _ in range(k):
        best, best_gain = -1, None
        evals = 0
        for w in range(n):
            if w in chosen:
                continue
            gain = f(seeds + [w]) - base
            evals += 1
            if best_gain is None or gain > best_gain:
                best, best_gain = w, gain
        stats.evaluations += evals
        stats.evaluations_per_iteration.append(evals)
        seeds.append(best)
        chosen.add(best)
        gains.append(best_gain / scale)
        base = f(seeds)
    return SeedSet(tuple(seeds), k, tuple(gains)), stats


def celf_select(n: int, k: int, spread: Objective, stats: SelectionStats | None = None,
                scale: float = 1.0) -> tuple[SeedSet, SelectionStats]:
    """Lazy greedy: a stale gain is an upper bound and is only refreshed when
    its node reaches the top of the max-heap."""
    check_k(k, n)
    stats = stats or SelectionStats()
    f = _Counted(spread, stats)
    if k == 0:
        return SeedSet((), 0, ()), stats
    heap = []
    for w in range(n):
        heap.append((-f([w]), w, 0))
    stats.evaluations += n
    per_iter = [n] if k else []
    heapq.heapify(heap)
    seeds: list[int] = []
    gains = []
    base = 0.0
    while len(seeds) < k:
        neg, w, flag = heapq.heappop(heap)
        if flag == len(seeds):
            seeds.append(w)
            gains.append(-neg / scale)
            base = f(seeds)
            if len(seeds) < k:
                per_iter.append(0)
            continue
        gain = f(seeds + [w]) - base
        stats.evaluations += 1
        per_iter[-1] += 1
        heapq.heappush(heap, (-gain, w, len(seeds)))
    stats.evaluations_per_iteration.extend(per_iter)
    return SeedSet(tuple(seeds), k, tuple(gains)), stats


def celfpp_select(n: int, k: int, spread: Objective, stats: SelectionStats | None = None,
                  scale: float = 1.0) -> tuple[SeedSet, SelectionStats]:
    """CELF with a look-ahead gain.

    Each time a node's gain w.r.t. S is computed, its gain w.r.t.
    S + {cur_best} is computed as well, cur_best being the best node seen
    so far in the current iteration. If cur_best is the next seed, the
    look-ahead value is the fresh gain and no new simulation is needed.
    """
    check_k(k, n)
    stats = stats or SelectionStats()
    f = _Counted(spread, stats)
    mg1 = [0.0] * n
    mg2: list[float | None] = [None] * n
    prev_best: list[int | None] = [None] * n
    flag = [0] * n
    seeds: list[int] = []
    gains = []
    base = 0.0
    last_seed: int | None = None
    cur_best: int | None = None

    def evaluate(w: int) -> None:
        nonlocal cur_best
        mg1[w] = f(seeds + [w]) - base
        stats.evaluations += 1
        prev_best[w] = cur_best
        if cur_best is None:
            mg2[w] = None
        else:
            mg2[w] = f(seeds + [w, cur_best]) - f(seeds + [cur_best])
            stats.lookahead_evaluations += 1
        flag[w] = len(seeds)
        if cur_best is None or mg1[w] > mg1[cur_best]:
            cur_best = w

    per_iter = [0] if k else []
    if k:
        for w in range(n):
            evaluate(w)
        per_iter[0] = n
    heap = [(-mg1[w], w) for w in range(n)]
    heapq.heapify(heap)
    while len(seeds) < k:
        _, w = heapq.heappop(heap)
        if flag[w] == len(seeds):
            seeds.append(w)
            gains.append(mg1[w] / scale)
            base = f(seeds)
            last_seed, cur_best = w, None
            if len(seeds) < k:
                per_iter.append(0)
            continue
        if (prev_best[w] is not None and prev_best[w] == last_seed
                and flag[w] == len(seeds) - 1 and mg2[w] is not None):
            mg1[w] = mg2[w]
            flag[w] = len(seeds)
            stats.lookahead_hits += 1
            if cur_best is None or mg1[w] > mg1[cur_best]:
                cur_best = w
        else:
            evaluate(w)
            per_iter[-1] += 1
        heapq.heappush(heap, (-mg1[w], w))
    stats.evaluations_per_iteration.extend(per_iter)
    return SeedSet(tuple(seeds), k, tuple(gains)), stats


_SELECTORS = {"greedy": greedy_select, "celf": celf_select, "celf++": celfpp_select}


def _run(which: str, g: WeightedGraph, model, k: int, rounds: int, rng: RngStream,
         spread: Objective | None) -> tuple[SeedSet, SelectionStats]:
    if spread is None:
        if rounds < 2:
            raise ValueError("rounds must be at least 2")
        world = WorldSpread(g, model, rounds, rng)
        spread, scale = world.total, float(rounds)
    else:
        scale = 1.0
    stats = SelectionStats()
    start = time.perf_counter()
    seeds, stats = _SELECTORS[which](g.node_count, k, spread, stats, scale)
    stats.wall_time = time.perf_counter() - start
    return seeds, stats


def greedy_mc(g: WeightedGraph, model: DiffusionModel | str, k: int, rounds: int, rng: RngStream,
              spread: Objective | None = None) -> tuple[SeedSet, SelectionStats]:
    """Greedy with ``rounds`` Monte-Carlo worlds per spread evaluation.

    Pass ``spread`` (e.g. an :class:`~imbench.exact.ExactSpreadOracle`) to
    replace the Monte-Carlo estimate.
    """
    return _run("greedy", g, model, k, rounds, rng, spread)


def celf(g: WeightedGraph, model: DiffusionModel | str, k: int, rounds: int, rng: RngStream,
         spread: Objective | None = None) -> tuple[SeedSet, SelectionStats]:
    return _run("celf", g, model, k, rounds, rng, spread)


def celfpp(g: WeightedGraph, model: DiffusionModel | str, k: int, rounds: int, rng: RngStream,
           spread: Objective | None = None) -> tuple[SeedSet, SelectionStats]:
    return _run("celf++", g, model, k, rounds, rng, spread)
