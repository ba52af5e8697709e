import itertools

import numpy as np
import pytest
from hypothesis import settings

from imbench.graph import WeightedGraph
from imbench.rng import RngStream

# JIT compilation makes first examples slow; keep runs bounded instead
settings.register_profile("imbench", deadline=None, max_examples=60)
settings.load_profile("imbench")


def brute_force_spread(g: WeightedGraph, model: str, seeds) -> float:
    """Reference spread by explicit enumeration of live-edge worlds in pure Python.

    IC: every arc is independently live. LT: every node keeps at most one
    in-arc. Shares no code with the package beyond the graph container.
    """
    arcs = [(int(u), int(v), float(p)) for u, v, p in g.arcs()]
    seeds = set(int(s) for s in seeds)
    if not seeds:
        return 0.0
    if model == "IC":
        choices = [[(True, p), (False, 1 - p)] for _, _, p in arcs]
        worlds = itertools.product(*choices)

        def live_arcs(world):
            return [a for a, (on, _) in zip(arcs, world) if on]
    else:
        per_node = []
        for v in range(g.node_count):
            ins = [(i, p) for i, (_, d, p) in enumerate(arcs) if d == v]
            opts = [(i, p) for i, p in ins]
            rest = 1 - sum(p for _, p in ins)
            if rest > 1e-15 or not ins:
                opts.append((None, max(rest, 0.0)))
            per_node.append(opts)
        worlds = itertools.product(*per_node)

        def live_arcs(world):
            return [arcs[i] for i, _ in world if i is not None]
    total = 0.0
    for world in worlds:
        prob = 1.0
        for _, q in world:
            prob *= q
        if prob == 0.0:
            continue
        out = {}
        for u, v, _ in live_arcs(world):
            out.setdefault(u, []).append(v)
        seen, stack = set(seeds), list(seeds)
        while stack:
            u = stack.pop()
            for v in out.get(u, ()):
                if v not in seen:
                    seen.add(v)
                    stack.append(v)
        total += prob * len(seen)
    return total


def tiny_graph(seed: int, n: int, m: int, lt: bool = False) -> WeightedGraph:
    """Random weighted graph with distinct arcs; LT-valid when ``lt``."""
    gen = np.random.default_rng(seed)
    pairs = [(u, v) for u in range(n) for v in range(n) if u != v]
    pick = gen.choice(len(pairs), size=min(m, len(pairs)), replace=False)
    src = np.array([pairs[i][0] for i in pick], dtype=np.int64)
    dst = np.array([pairs[i][1] for i in pick], dtype=np.int64)
    p = gen.uniform(0.05, 0.95, size=len(src))
    if lt:
        indeg = np.bincount(dst, minlength=n)
        p = p / np.maximum(indeg[dst], 1) * gen.uniform(0.5, 1.0, size=len(src))
    return WeightedGraph(n, src, dst, p)


@pytest.fixture
def rng():
    return RngStream(20240601)


# acceptance verdicts, echoed in the terminal summary so they show without -s
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1])):
            terminalreporter.write_line(line)
