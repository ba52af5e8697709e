"""Reverse-reachable sets, their inverted index, and greedy max coverage."""
from __future__ import annotations

import os
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .. import _kernels as K
from ..diffusion import DiffusionModel, as_model, check_graph
from ..errors import ResourceCapError
from ..graph import WeightedGraph
from ..rng import RngStream
from .common import SeedSet

DEFAULT_MEMORY_CAP = 2 << 30
# one node id in a set plus its entry in the inverted index, both int32
SLOT_BYTES = 8
MEMORY_CAP_ENV = "IMBENCH_MEMORY_CAP"


def memory_cap_slots(cap_bytes: int | None = None) -> int:
    """RR storage cap in node-slots; ``IMBENCH_MEMORY_CAP`` (bytes) overrides the default."""
    if cap_bytes is None:
        env = os.environ.get(MEMORY_CAP_ENV)
        cap_bytes = int(float(env)) if env else DEFAULT_MEMORY_CAP
    return max(1, cap_bytes // SLOT_BYTES)


@dataclass(frozen=True, eq=False)
class RRIndex:
    """RR-sets in CSR form (``ptr``, ``nodes``) plus the node -> set transpose."""

    ptr: np.ndarray
    nodes: np.ndarray
    node_count: int
    model: str = ""

    @classmethod
    def from_sets(cls, sets: Iterable[Iterable[int]], node_count: int | None = None,
                  model: str = "") -> RRIndex:
        sets = [sorted(set(int(v) for v in s)) for s in sets]
        sizes = np.array([len(s) for s in sets], dtype=np.int64)
        ptr = np.zeros(len(sets) + 1, dtype=np.int64)
        np.cumsum(sizes, out=ptr[1:])
        nodes = np.array([v for s in sets for v in s], dtype=np.int32)
        if node_count is None:
            node_count = int(nodes.max()) + 1 if len(nodes) else 0
        if len(nodes) and (nodes.min() < 0 or nodes.max() >= node_count):
            raise ValueError("set member outside [0, node_count)")
        return cls(ptr, nodes, node_count, model)

    @classmethod
    def empty(cls, node_count: int, model: str = "") -> RRIndex:
        return cls(np.zeros(1, dtype=np.int64), np.zeros(0, dtype=np.int32), node_count, model)

    @property
    def theta(self) -> int:
        return len(self.ptr) - 1

    @property
    def storage(self) -> int:
        """Total node-slots held by the sets."""
        return int(self.ptr[-1])

    def set(self, i: int) -> frozenset[int]:
        return frozenset(self.nodes[self.ptr[i]:self.ptr[i + 1]].tolist())

    @property
    def sets(self) -> list[frozenset[int]]:
        return [self.set(i) for i in range(self.theta)]

    @cached_property
    def _inverted(self) -> tuple[np.ndarray, np.ndarray]:
        set_ids = np.repeat(np.arange(self.theta, dtype=np.int32), np.diff(self.ptr))
        order = np.argsort(self.nodes, kind="stable")
        counts = np.bincount(self.nodes, minlength=self.node_count) if len(self.nodes) else \
            np.zeros(self.node_count, dtype=np.int64)
        inv_ptr = np.zeros(self.node_count + 1, dtype=np.int64)
        np.cumsum(counts, out=inv_ptr[1:])
        return inv_ptr, set_ids[order]

    @property
    def inv_ptr(self) -> np.ndarray:
        return self._inverted[0]

    @property
    def inv(self) -> np.ndarray:
        return self._inverted[1]

    def containing(self, v: int) -> np.ndarray:
        """Indices of the sets that contain node ``v``."""
        return self.inv[self.inv_ptr[v]:self.inv_ptr[v + 1]]

    @property
    def inverted(self) -> dict[int, list[int]]:
        return {v: self.containing(v).tolist() for v in range(self.node_count)
                if self.inv_ptr[v + 1] > self.inv_ptr[v]}

    def coverage(self, seeds: Sequence[int]) -> float:
        """Fraction of sets that contain at least one seed."""
        return float(K.coverage_fraction(self.ptr, self.nodes, self.node_count,
                                         np.asarray(list(seeds), dtype=np.int64)))

    def concat(self, other: RRIndex) -> RRIndex:
        if other.node_count != self.node_count:
            raise ValueError("cannot join indexes over different node counts")
        ptr = np.concatenate([self.ptr, other.ptr[1:] + self.ptr[-1]])
        return RRIndex(ptr, np.concatenate([self.nodes, other.nodes]), self.node_count, self.model)


def _root(skey: int, n: int) -> int:
    return min(int(K.uniform(np.uint64(skey), K.ROOT_COUNTER) * n), n - 1)


def generate_rr_set(g: WeightedGraph, model: DiffusionModel | str, root: int, rng: RngStream) -> frozenset[int]:
    """One RR-set rooted at ``root`` drawn from the world keyed by ``rng``.

    IC: reverse BFS keeping each in-arc with its probability. LT: reverse
    walk choosing at most one in-arc per step with probability equal to its
    weight, stopping at a revisited node.
    """
    model = as_model(model)
    check_graph(g, model)
    if not 0 <= root < g.node_count:
        raise ValueError(f"root {root} is not a node id")
    mark = np.zeros(g.node_count, dtype=np.int64)
    out = np.empty(g.node_count, dtype=np.int32)
    skey = np.uint64(rng.key)
    if model is DiffusionModel.IC:
        size = K._rr_ic(root, g.in_ptr, g.in_src, g.in_order, g.in_p, skey, mark, 1, out, 0)
    else:
        size = K._rr_lt(root, g.in_ptr, g.in_src, g.in_p, skey, mark, 1, out, 0)
    return frozenset(out[:size].tolist())


def sample_rr_sets(g: WeightedGraph, model: DiffusionModel | str, count: int, rng: RngStream,
                   start: int = 0, cap_slots: int | None = None) -> RRIndex:
    """RR-sets ``start .. start+count-1`` of stream ``rng``, roots uniform.

    Set ``j`` uses stream ``rng.child(j)``; its root is drawn from that
    stream, so growing a sample never changes the sets already drawn.
    """
    model = as_model(model)
    check_graph(g, model)
    cap = memory_cap_slots() if cap_slots is None else cap_slots
    if count > cap:
        raise ResourceCapError(f"{count} RR-sets exceed the storage cap of {cap} node-slots")
    if count == 0 or g.node_count == 0:
        return RRIndex.empty(g.node_count, model.value)
    args = (model.code, g.node_count, g.in_ptr, g.in_src, g.in_order, g.in_p, np.uint64(rng.key))
    sizes = K.rr_sizes(*args, start, count)
    ptr = np.zeros(count + 1, dtype=np.int64)
    np.cumsum(sizes, out=ptr[1:])
    if ptr[-1] > cap:
        raise ResourceCapError(f"RR-sets need {int(ptr[-1])} node-slots, above the cap of {cap}")
    nodes = K.rr_fill(*args, start, ptr)
    return RRIndex(ptr, nodes, g.node_count, model.value)


def max_coverage(index: RRIndex, k: int) -> SeedSet:
    """Greedy max coverage: repeatedly take the node in the most uncovered sets.

    Gains are reported in spread units, ``n * newly covered / theta``.
    When nothing is left to cover the lowest unused ids are taken and
    ``info["zero_coverage"]`` is set.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    n = index.node_count
    k_eff = min(k, n)
    if k_eff == 0:
        return SeedSet((), k, (), {"covered": 0, "theta": index.theta, "zero_coverage": True})
    chosen, newly, total = K.max_coverage(index.ptr, index.nodes, index.inv_ptr, index.inv, n, k_eff)
    theta = index.theta
    gains = newly * (n / theta) if theta else np.zeros(k_eff)
    info = {"covered": int(total), "theta": theta, "zero_coverage": bool((newly == 0).any())}
    return SeedSet(tuple(chosen.tolist()), k, tuple(gains.tolist()), info)
