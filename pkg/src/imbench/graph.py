"""Directed influence graphs: ingestion, weighting and generators.

Internal node ids are always contiguous from 0. Original labels survive
only in ``WeightedGraph.labels`` so no label value can collide with a
structural sentinel, whatever the input file contains.
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from typing import Iterable, TextIO

import numpy as np

from .errors import ParseError
from .rng import RngStream

LT_TOLERANCE = 1e-9


@dataclass(frozen=True, eq=False)
class WeightedGraph:
    """Directed multigraph with per-arc probabilities and dual adjacency.

    Arcs are stored sorted by (src, dst, p); the arc id used everywhere
    (including as the random-draw counter in simulations) is the position
    in that order. ``p`` is ``None`` for a graph that has not been weighted.
    """

    node_count: int
    src: np.ndarray
    dst: np.ndarray
    p: np.ndarray | None = None
    labels: np.ndarray | None = None
    name: str = ""
    scheme: str = ""

    def __post_init__(self):
        src = np.ascontiguousarray(self.src, dtype=np.int32)
        dst = np.ascontiguousarray(self.dst, dtype=np.int32)
        if src.shape != dst.shape:
            raise ValueError("src and dst must have the same length")
        p = None if self.p is None else np.ascontiguousarray(self.p, dtype=np.float64)
        if p is not None and p.shape != src.shape:
            raise ValueError("p must have one entry per arc")
        n = int(self.node_count)
        if n < 0:
            raise ValueError("node_count must be non-negative")
        if len(src) and (src.min() < 0 or dst.min() < 0 or src.max() >= n or dst.max() >= n):
            raise ValueError("arc endpoint outside [0, node_count)")
        if p is not None and len(p) and (np.isnan(p).any() or p.min() < 0.0 or p.max() > 1.0):
            raise ValueError("arc probabilities must lie in [0, 1]")
        keys = (dst, src) if p is None else (p, dst, src)
        order = np.lexsort(keys)
        src, dst = src[order], dst[order]
        if p is not None:
            p = p[order]
        for arr in (src, dst, p):
            if arr is not None:
                arr.setflags(write=False)
        labels = np.arange(n, dtype=np.int64) if self.labels is None else np.asarray(self.labels, dtype=np.int64)
        if len(labels) != n:
            raise ValueError("labels must have one entry per node")
        labels.setflags(write=False)
        object.__setattr__(self, "node_count", n)
        object.__setattr__(self, "src", src)
        object.__setattr__(self, "dst", dst)
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "labels", labels)

    @property
    def arc_count(self) -> int:
        return len(self.src)

    @property
    def weighted(self) -> bool:
        return self.p is not None

    @cached_property
    def out_ptr(self) -> np.ndarray:
        return _ptr(self.src, self.node_count)

    @cached_property
    def in_order(self) -> np.ndarray:
        """Arc ids sorted by destination (stable), i.e. the in-adjacency."""
        return np.argsort(self.dst, kind="stable").astype(np.int64)

    @cached_property
    def in_ptr(self) -> np.ndarray:
        return _ptr(self.dst[self.in_order], self.node_count)

    @cached_property
    def in_src(self) -> np.ndarray:
        return np.ascontiguousarray(self.src[self.in_order])

    @cached_property
    def in_p(self) -> np.ndarray:
        self.require_weights()
        return np.ascontiguousarray(self.p[self.in_order])

    @cached_property
    def indegree(self) -> np.ndarray:
        return np.bincount(self.dst, minlength=self.node_count).astype(np.int64)

    @cached_property
    def outdegree(self) -> np.ndarray:
        return np.bincount(self.src, minlength=self.node_count).astype(np.int64)

    @cached_property
    def in_weight(self) -> np.ndarray:
        """Sum of incoming arc probabilities per node."""
        if self.p is None:
            raise ValueError("graph has no weights")
        return np.bincount(self.dst, weights=self.p, minlength=self.node_count)

    @cached_property
    def id_map(self) -> dict[int, int]:
        return {int(label): i for i, label in enumerate(self.labels)}

    def out_arcs(self, v: int) -> np.ndarray:
        return np.arange(self.out_ptr[v], self.out_ptr[v + 1])

    def in_arcs(self, v: int) -> np.ndarray:
        return self.in_order[self.in_ptr[v]:self.in_ptr[v + 1]]

    def arcs(self) -> Iterable[tuple[int, int, float]]:
        p = self.p if self.p is not None else np.full(self.arc_count, np.nan)
        return zip(self.src.tolist(), self.dst.tolist(), p.tolist())

    def is_lt_valid(self) -> bool:
        return bool(self.node_count == 0 or self.in_weight.max(initial=0.0) <= 1.0 + LT_TOLERANCE)

    def require_weights(self) -> None:
        if self.p is None:
            raise ValueError("graph has no weights; call assign_weights first")

    def with_weights(self, p: np.ndarray, scheme: str = "") -> WeightedGraph:
        return WeightedGraph(self.node_count, self.src, self.dst, p, self.labels, self.name, scheme)

    def subgraph(self, nodes: Iterable[int]) -> tuple[WeightedGraph, np.ndarray]:
        """Induced subgraph; returns it with the old ids of its nodes."""
        keep = np.unique(np.fromiter(nodes, dtype=np.int64))
        new_id = np.full(self.node_count, -1, dtype=np.int64)
        new_id[keep] = np.arange(len(keep))
        mask = (new_id[self.src] >= 0) & (new_id[self.dst] >= 0)
        p = None if self.p is None else self.p[mask]
        sub = WeightedGraph(len(keep), new_id[self.src[mask]], new_id[self.dst[mask]], p,
                            self.labels[keep], self.name, self.scheme)
        return sub, keep

    def to_csv(self, labels: str = "internal", id_offset: int = 0) -> str:
        """Canonical dump, header ``src,dst,p``, sorted by src, dst, p."""
        if labels == "original":
            s, d = self.labels[self.src], self.labels[self.dst]
        else:
            s, d = self.src.astype(np.int64) + id_offset, self.dst.astype(np.int64) + id_offset
        p = self.p if self.p is not None else np.full(self.arc_count, np.nan)
        order = np.lexsort((p, d, s))
        out = io.StringIO()
        out.write("src,dst,p\n")
        for i in order:
            pv = "" if np.isnan(p[i]) else repr(float(p[i]))
            out.write(f"{s[i]},{d[i]},{pv}\n")
        return out.getvalue()


def _ptr(keys: np.ndarray, n: int) -> np.ndarray:
    counts = np.bincount(keys, minlength=n) if len(keys) else np.zeros(n, dtype=np.int64)
    ptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(counts, out=ptr[1:])
    return ptr


@dataclass
class IdNormalizationReport:
    labels: np.ndarray
    remapped_count: int
    contained_zero: bool
    self_loops_dropped: int = 0

    def to_dict(self) -> dict:
        return {
            "node_count": len(self.labels),
            "remapped_count": self.remapped_count,
            "contained_zero": self.contained_zero,
            "self_loops_dropped": self.self_loops_dropped,
            "min_label": int(self.labels.min()) if len(self.labels) else None,
            "max_label": int(self.labels.max()) if len(self.labels) else None,
        }


def parse_edge_list(text: str | TextIO, directed: bool = True, name: str = "") -> tuple[WeightedGraph, IdNormalizationReport]:
    """Read a whitespace-separated integer edge list.

    Blank lines and lines starting with ``#`` are skipped. Self-loops are
    dropped, parallel arcs are kept. With ``directed=False`` every edge
    becomes two arcs. Labels are mapped to ids ``0..n-1`` in ascending
    label order.
    """
    lines = io.StringIO(text) if isinstance(text, str) else text
    pairs: list[tuple[int, int]] = []
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 2:
            raise ParseError(f"expected two node labels, got {len(parts)} fields: {line!r}", lineno)
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError:
            raise ParseError(f"node labels must be integers: {line!r}", lineno) from None
        if u < 0 or v < 0:
            raise ParseError(f"negative node label: {line!r}", lineno)
        pairs.append((u, v))

    raw_arr = np.array(pairs, dtype=np.int64).reshape(-1, 2)
    labels, inverse = np.unique(raw_arr, return_inverse=True)
    ids = inverse.reshape(-1, 2)
    loops = ids[:, 0] == ids[:, 1]
    ids = ids[~loops]
    src, dst = ids[:, 0], ids[:, 1]
    if not directed:
        src, dst = np.concatenate([src, dst]), np.concatenate([dst, src])
    report = IdNormalizationReport(
        labels=labels,
        remapped_count=int(np.count_nonzero(labels != np.arange(len(labels)))),
        contained_zero=bool(len(labels) and labels[0] == 0),
        self_loops_dropped=int(loops.sum()),
    )
    return WeightedGraph(len(labels), src, dst, None, labels, name), report


def read_graph_csv(text: str | TextIO, name: str = "") -> WeightedGraph:
    """Read a ``src,dst,p`` dump as written by :meth:`WeightedGraph.to_csv`.

    The ``p`` column may be empty for every arc (unweighted) or for none.
    Nodes without arcs do not appear in a dump and are not recovered.
    """
    rows = csv.reader(io.StringIO(text) if isinstance(text, str) else text)
    header = next(rows, None)
    if header is None or [h.strip() for h in header] != ["src", "dst", "p"]:
        raise ParseError("expected the header 'src,dst,p'", 1)
    src, dst, p = [], [], []
    for lineno, row in enumerate(rows, start=2):
        if not row:
            continue
        if len(row) != 3:
            raise ParseError(f"expected 3 fields, got {len(row)}", lineno)
        try:
            src.append(int(row[0]))
            dst.append(int(row[1]))
            p.append(float(row[2]) if row[2].strip() else None)
        except ValueError:
            raise ParseError(f"malformed row {row!r}", lineno) from None
    weighted = {x is not None for x in p}
    if len(weighted) > 1:
        raise ParseError("either every arc or no arc may carry a probability")
    raw = np.array([src, dst], dtype=np.int64).T.reshape(-1, 2)
    if len(raw) and raw.min() < 0:
        raise ParseError("negative node label")
    labels, inverse = np.unique(raw, return_inverse=True)
    ids = inverse.reshape(-1, 2)
    probs = np.array(p, dtype=np.float64) if weighted == {True} else None
    return WeightedGraph(len(labels), ids[:, 0], ids[:, 1], probs, labels, name)


class SchemeKind(str, Enum):
    UNIFORM_IC = "uniform"
    WEIGHTED_CASCADE = "wc"
    LT_UNIFORM = "lt-uniform"
    LT_PARALLEL = "lt-parallel"


@dataclass(frozen=True)
class WeightScheme:
    kind: SchemeKind
    p: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "kind", SchemeKind(self.kind))
        if self.kind is SchemeKind.UNIFORM_IC:
            if self.p is None or not 0.0 <= self.p <= 1.0:
                raise ValueError(f"UniformIC probability must be in [0, 1], got {self.p}")
        elif self.p is not None:
            raise ValueError(f"{self.kind.value} takes no probability")

    @classmethod
    def uniform(cls, p: float) -> WeightScheme:
        return cls(SchemeKind.UNIFORM_IC, p)

    @classmethod
    def parse(cls, spec: str) -> WeightScheme:
        """``uniform:0.1``, ``wc``, ``lt-uniform`` or ``lt-parallel``."""
        kind, _, arg = spec.partition(":")
        if kind == SchemeKind.UNIFORM_IC.value:
            if not arg:
                raise ValueError("uniform scheme needs a probability, e.g. uniform:0.1")
            return cls(SchemeKind.UNIFORM_IC, float(arg))
        if arg:
            raise ValueError(f"scheme {kind!r} takes no argument")
        return cls(SchemeKind(kind))

    def __str__(self) -> str:
        return f"uniform:{self.p}" if self.kind is SchemeKind.UNIFORM_IC else self.kind.value


WeightedCascade = WeightScheme(SchemeKind.WEIGHTED_CASCADE)
LTUniform = WeightScheme(SchemeKind.LT_UNIFORM)
LTParallel = WeightScheme(SchemeKind.LT_PARALLEL)


def UniformIC(p: float) -> WeightScheme:
    return WeightScheme.uniform(p)


def assign_weights(g: WeightedGraph, scheme: WeightScheme) -> WeightedGraph:
    if g.node_count < 1:
        raise ValueError("cannot weight an empty graph")
    kind = scheme.kind
    if kind is SchemeKind.UNIFORM_IC:
        return g.with_weights(np.full(g.arc_count, scheme.p), str(scheme))
    indeg = g.indegree
    if kind in (SchemeKind.WEIGHTED_CASCADE, SchemeKind.LT_UNIFORM):
        return g.with_weights(1.0 / indeg[g.dst], str(scheme))
    # LT-parallel: c parallel copies of (u, v) become one arc of weight c / indegree(v)
    pair = g.src.astype(np.int64) * g.node_count + g.dst
    uniq, counts = np.unique(pair, return_counts=True)
    src, dst = uniq // g.node_count, uniq % g.node_count
    p = counts / indeg[dst]
    return WeightedGraph(g.node_count, src, dst, p, g.labels, g.name, str(scheme))


@dataclass(frozen=True)
class CounterexampleLayout:
    """Node id ranges of :func:`counterexample_graph`."""

    n: int
    root: int = 0
    hubs: range = field(init=False)
    leaves: range = field(init=False)
    cliques: range = field(init=False)

    def __post_init__(self):
        n = self.n
        object.__setattr__(self, "hubs", range(1, 2 * n + 1))
        object.__setattr__(self, "leaves", range(2 * n + 1, 2 * n + 1 + 2 * n * (n - 1)))
        start = self.leaves.stop
        object.__setattr__(self, "cliques", range(start, start + 2 * n ** 3))

    @property
    def clique_count(self) -> int:
        return self.n ** 3

    def clique(self, j: int) -> tuple[int, int]:
        x = self.cliques.start + 2 * j
        return x, x + 1

    @property
    def gadget(self) -> range:
        """The root, its hubs and their leaves."""
        return range(0, self.leaves.stop)


def counterexample_graph(n: int) -> WeightedGraph:
    """Graph on which the best singleton's ``mean - sd`` stays below 1.5.

    The root (id 0) points to 2n hubs with probability 1/(2n); each hub
    has n-1 private leaves behind probability-1 arcs; n**3 disjoint
    2-cliques hang off to the side with probability 1 in both directions.
    Under IC the root's spread is 1 + n with standard deviation
    n * sqrt(1 - 1/(2n)), while every clique node has spread 2.
    """
    if n < 2:
        raise ValueError(f"counterexample needs n >= 2, got {n}")
    lay = CounterexampleLayout(n)
    hubs = np.arange(lay.hubs.start, lay.hubs.stop)
    src = [np.zeros(2 * n, dtype=np.int64)]
    dst = [hubs]
    p = [np.full(2 * n, 1.0 / (2 * n))]
    leaf_src = np.repeat(hubs, n - 1)
    src.append(leaf_src)
    dst.append(np.arange(lay.leaves.start, lay.leaves.stop))
    p.append(np.ones(len(leaf_src)))
    xs = np.arange(lay.cliques.start, lay.cliques.stop, 2)
    src += [xs, xs + 1]
    dst += [xs + 1, xs]
    p.append(np.ones(2 * len(xs)))
    node_count = lay.cliques.stop
    return WeightedGraph(node_count, np.concatenate(src), np.concatenate(dst), np.concatenate(p),
                         name=f"counterexample-n{n}", scheme="counterexample")


def random_graph(n: int, m: int, rng: RngStream, name: str = "") -> WeightedGraph:
    """Unweighted directed graph with ``m`` distinct arcs chosen uniformly."""
    if m > n * (n - 1):
        raise ValueError(f"cannot place {m} distinct arcs on {n} nodes")
    gen = rng.generator()
    chosen: set[int] = set()
    while len(chosen) < m:
        need = m - len(chosen)
        u = gen.integers(0, n, size=2 * need)
        v = gen.integers(0, n, size=2 * need)
        for a, b in zip(u.tolist(), v.tolist()):
            if a != b:
                chosen.add(a * n + b)
                if len(chosen) == m:
                    break
    codes = np.fromiter(sorted(chosen), dtype=np.int64, count=m)
    return WeightedGraph(n, codes // n, codes % n, name=name or f"random-n{n}-m{m}")


def powerlaw_graph(n: int, m: int, rng: RngStream, exponent: float = 2.5, name: str = "") -> WeightedGraph:
    """Unweighted directed Chung-Lu style graph with heavy-tailed degrees.

    Endpoints are drawn in proportion to ``(i + 1) ** (-1 / (exponent - 1))``
    over a random node permutation, independently for tails and heads;
    self-loops and repeated arcs are redrawn until ``m`` distinct arcs exist.
    """
    if m > n * (n - 1):
        raise ValueError(f"cannot place {m} distinct arcs on {n} nodes")
    gen = rng.generator()
    weights = (np.arange(n) + 1.0) ** (-1.0 / (exponent - 1.0))
    weights /= weights.sum()
    out_perm, in_perm = gen.permutation(n), gen.permutation(n)
    codes = np.empty(0, dtype=np.int64)
    while len(codes) < m:
        need = m - len(codes)
        size = int(need * 1.2) + 16
        u = out_perm[gen.choice(n, size=size, p=weights)]
        v = in_perm[gen.choice(n, size=size, p=weights)]
        new = (u * n + v)[u != v]
        _, first = np.unique(new, return_index=True)
        new = new[np.sort(first)]
        new = new[~np.isin(new, codes)]
        codes = np.concatenate([codes, new[:need]])
    return WeightedGraph(n, codes // n, codes % n, name=name or f"powerlaw-n{n}-m{m}")


def parse_generator(spec: str, rng: RngStream) -> WeightedGraph:
    """Build a graph from ``counterexample:n=10``, ``random:n=100,m=400`` or
    ``powerlaw:n=10000,m=50000``."""
    kind, _, rest = spec.partition(":")
    args: dict[str, float] = {}
    for item in filter(None, rest.split(",")):
        key, _, val = item.partition("=")
        args[key.strip()] = float(val)
    try:
        if kind == "counterexample":
            return counterexample_graph(int(args["n"]))
        if kind == "random":
            return random_graph(int(args["n"]), int(args["m"]), rng)
        if kind == "powerlaw":
            return powerlaw_graph(int(args["n"]), int(args["m"]), rng, args.get("exponent", 2.5))
    except KeyError as exc:
        raise ValueError(f"generator {kind!r} is missing argument {exc.args[0]!r}") from None
    raise ValueError(f"unknown generator {kind!r}")
