"""Exact expected spread by enumerating live-edge worlds.

Computing the spread is #P-hard, so this is an oracle for tiny instances
only. Arcs with probability 0 or 1 are not enumerated, and
:func:`exact_spread` only looks at the part of the graph reachable from the
seeds; the size caps apply after that pruning.

The implementation shares nothing with the Monte-Carlo kernels: it
enumerates worlds explicitly in numpy and propagates reachability.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator

import numpy as np

from .diffusion import DiffusionModel, as_model, check_graph, check_seeds
from .errors import ResourceCapError
from .graph import WeightedGraph

IC_ARC_CAP = 20
LT_WORLD_CAP = 1 << 20
_CHUNK = 1 << 14
_ZERO = 1e-15


@dataclass
class _Worlds:
    """Enumerable live-edge worlds over a set of candidate arcs.

    ``fixed`` arcs are live in every world. The other arcs are switched by
    ``live(start, stop)``, which returns a (worlds, arcs) boolean block and
    the matching world probabilities.
    """

    fixed: np.ndarray
    varying: np.ndarray
    count: int
    _ic_p: np.ndarray | None = None
    _lt_groups: list | None = None

    def blocks(self, chunk: int = _CHUNK) -> Iterator[tuple[np.ndarray, np.ndarray]]:
        for start in range(0, self.count, chunk):
            stop = min(self.count, start + chunk)
            yield self._block(np.arange(start, stop, dtype=np.int64))

    def _block(self, w: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        prob = np.ones(len(w))
        live = np.zeros((len(w), len(self.varying)), dtype=bool)
        if self._ic_p is not None:
            for j, p in enumerate(self._ic_p):
                bit = ((w >> j) & 1).astype(bool)
                live[:, j] = bit
                prob *= np.where(bit, p, 1.0 - p)
            return live, prob
        stride = 1
        for options in self._lt_groups:
            pick = (w // stride) % len(options)
            stride *= len(options)
            probs = np.array([q for _, q in options])
            prob *= probs[pick]
            for o, (col, _) in enumerate(options):
                if col >= 0:
                    live[:, col] = pick == o
        return live, prob


def _ic_worlds(g: WeightedGraph, arcs: np.ndarray) -> _Worlds:
    p = g.p[arcs]
    arcs = arcs[p > 0.0]
    p = g.p[arcs]
    fixed, varying = arcs[p >= 1.0], arcs[p < 1.0]
    if len(varying) > IC_ARC_CAP:
        raise ResourceCapError(
            f"exact IC oracle: {len(varying)} uncertain arcs exceed the cap of {IC_ARC_CAP} "
            f"(2^{len(varying)} worlds)")
    return _Worlds(fixed, varying, 1 << len(varying), _ic_p=g.p[varying])


def _lt_worlds(g: WeightedGraph, nodes: Iterable[int], allowed_src: np.ndarray) -> _Worlds:
    fixed: list[int] = []
    varying: list[int] = []
    groups = []
    count = 1
    for v in nodes:
        options = []
        rest = 1.0
        for e in g.in_arcs(int(v)):
            w = float(g.p[e])
            if w <= 0.0 or not allowed_src[g.src[e]]:
                continue
            rest -= w
            options.append([int(e), w])
        if rest > _ZERO:
            options.append([-1, rest])
        if not options:
            continue
        if len(options) == 1:
            if options[0][0] >= 0:
                fixed.append(options[0][0])
            continue
        group = []
        for e, w in options:
            if e >= 0:
                group.append((len(varying), w))
                varying.append(e)
            else:
                group.append((-1, w))
        groups.append(group)
        count *= len(group)
        if count > LT_WORLD_CAP:
            raise ResourceCapError(
                f"exact LT oracle: more than {LT_WORLD_CAP} live-edge worlds (cap 2^20)")
    return _Worlds(np.array(fixed, dtype=np.int64), np.array(varying, dtype=np.int64), count,
                   _lt_groups=groups)


def _reachable(g: WeightedGraph, seeds: np.ndarray) -> np.ndarray:
    """Nodes reachable from ``seeds`` along arcs of positive probability."""
    seen = np.zeros(g.node_count, dtype=bool)
    seen[seeds] = True
    stack = list(seeds.tolist())
    ptr, p = g.out_ptr, g.p
    while stack:
        u = stack.pop()
        for e in range(ptr[u], ptr[u + 1]):
            v = g.dst[e]
            if p[e] > 0.0 and not seen[v]:
                seen[v] = True
                stack.append(int(v))
    return seen


def exact_spread(g: WeightedGraph, model: DiffusionModel | str, seeds: Iterable[int]) -> float:
    """Expected number of active nodes, seeds included, computed exactly."""
    model = as_model(model)
    check_graph(g, model)
    seeds = check_seeds(g, seeds)
    if len(seeds) == 0:
        return 0.0
    reach = _reachable(g, seeds)
    is_seed = np.zeros(g.node_count, dtype=bool)
    is_seed[seeds] = True
    if model is DiffusionModel.IC:
        arcs = np.flatnonzero(reach[g.src] & ~is_seed[g.dst])
        worlds = _ic_worlds(g, arcs)
    else:
        worlds = _lt_worlds(g, np.flatnonzero(reach & ~is_seed), reach)

    local = np.full(g.node_count, -1, dtype=np.int64)
    nodes = np.flatnonzero(reach)
    local[nodes] = np.arange(len(nodes))
    fixed_src, fixed_dst = local[g.src[worlds.fixed]], local[g.dst[worlds.fixed]]
    var_src, var_dst = local[g.src[worlds.varying]], local[g.dst[worlds.varying]]

    total = 0.0
    for live, prob in worlds.blocks():
        active = np.zeros((len(prob), len(nodes)), dtype=bool)
        active[:, local[seeds]] = True
        changed = True
        while changed:
            changed = False
            for u, v in zip(fixed_src, fixed_dst):
                new = active[:, u] & ~active[:, v]
                if new.any():
                    active[:, v] |= new
                    changed = True
            for j, (u, v) in enumerate(zip(var_src, var_dst)):
                new = active[:, u] & live[:, j] & ~active[:, v]
                if new.any():
                    active[:, v] |= new
                    changed = True
        total += float(prob @ active.sum(axis=1))
    return total


class ExactSpreadOracle:
    """Exact spread of any seed set on one small graph (at most 63 nodes).

    Per-world reachability bitmasks are computed once; each query is then
    an OR over the seeds' masks, a popcount and a weighted sum.
    """

    def __init__(self, g: WeightedGraph, model: DiffusionModel | str):
        model = as_model(model)
        check_graph(g, model)
        n = g.node_count
        if n > 63:
            raise ResourceCapError(f"exact oracle table supports at most 63 nodes, got {n}")
        self.g, self.model = g, model
        if model is DiffusionModel.IC:
            worlds = _ic_worlds(g, np.arange(g.arc_count))
        else:
            worlds = _lt_worlds(g, range(n), np.ones(n, dtype=bool))
        self.world_count = worlds.count
        masks, probs = [], []
        fixed = list(zip(g.src[worlds.fixed], g.dst[worlds.fixed]))
        varying = list(zip(g.src[worlds.varying], g.dst[worlds.varying]))
        for live, prob in worlds.blocks():
            reach = np.tile(np.uint64(1) << np.arange(n, dtype=np.uint64), (len(prob), 1))
            changed = True
            while changed:
                changed = False
                for u, v in fixed:
                    merged = reach[:, u] | reach[:, v]
                    if (merged != reach[:, u]).any():
                        reach[:, u] = merged
                        changed = True
                for j, (u, v) in enumerate(varying):
                    merged = np.where(live[:, j], reach[:, u] | reach[:, v], reach[:, u])
                    if (merged != reach[:, u]).any():
                        reach[:, u] = merged
                        changed = True
            masks.append(reach)
            probs.append(prob)
        self._reach = np.concatenate(masks) if masks else np.zeros((1, n), dtype=np.uint64)
        self._prob = np.concatenate(probs) if probs else np.ones(1)
        self.calls = 0

    def __call__(self, seeds: Iterable[int]) -> float:
        seeds = check_seeds(self.g, seeds)
        self.calls += 1
        if len(seeds) == 0:
            return 0.0
        mask = np.bitwise_or.reduce(self._reach[:, seeds], axis=1)
        return float(self._prob @ np.bitwise_count(mask))
