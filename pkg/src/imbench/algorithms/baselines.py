"""Baselines that need no spread estimation at all."""
from __future__ import annotations

import numpy as np

from ..graph import WeightedGraph
from ..rng import RngStream
from .common import SeedSet, check_k


def random_select(g: WeightedGraph, k: int, rng: RngStream) -> SeedSet:
    """k nodes uniformly at random without replacement."""
    check_k(k, g.node_count)
    picks = rng.generator().choice(g.node_count, size=k, replace=False)
    return SeedSet(tuple(picks.tolist()), k)


def degree_select(g: WeightedGraph, k: int) -> SeedSet:
    """Top-k nodes by out-degree, ties to the lower id."""
    check_k(k, g.node_count)
    order = np.lexsort((np.arange(g.node_count), -g.outdegree))
    top = order[:k]
    return SeedSet(tuple(top.tolist()), k, tuple(g.outdegree[top].astype(float).tolist()))
