from __future__ import annotations

import io
from dataclasses import dataclass, field
from ..graph import WeightedGraph


@dataclass(frozen=True)
class SeedSet:
    """Selected seeds in selection order, with optional per-seed gain estimates."""

    nodes: tuple[int, ...]
    k: int
    gains: tuple[float, ...] | None = None
    info: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        nodes = tuple(int(v) for v in self.nodes)
        if len(set(nodes)) != len(nodes):
            raise ValueError("seed nodes must be distinct")
        object.__setattr__(self, "nodes", nodes)
        if self.gains is not None:
            object.__setattr__(self, "gains", tuple(float(x) for x in self.gains))

    def __len__(self) -> int:
        return len(self.nodes)

    def __iter__(self):
        return iter(self.nodes)

    def to_csv(self, g: WeightedGraph | None = None) -> str:
        out = io.StringIO()
        out.write("rank,node_label,marginal_gain_estimate\n")
        for rank, v in enumerate(self.nodes, start=1):
            label = int(g.labels[v]) if g is not None else v
            gain = "" if self.gains is None else repr(self.gains[rank - 1])
            out.write(f"{rank},{label},{gain}\n")
        return out.getvalue()

    def to_dict(self) -> dict:
        return {"nodes": list(self.nodes), "k": self.k,
                "gains": None if self.gains is None else list(self.gains)}


@dataclass
class SelectionStats:
    evaluations: int = 0
    lookahead_evaluations: int = 0
    lookahead_hits: int = 0
    spread_calls: int = 0
    wall_time: float = 0.0
    theta: int = 0
    rr_slots: int = 0
    extra: dict = field(default_factory=dict)

    @property
    def evaluations_per_iteration(self) -> list[int]:
        return self.extra.setdefault("evaluations_per_iteration", [])

    def to_dict(self) -> dict:
        d = {k: getattr(self, k) for k in ("evaluations", "lookahead_evaluations", "lookahead_hits",
                                          "spread_calls", "wall_time", "theta", "rr_slots")}
        d["extra"] = self.extra
        return d


def check_k(k: int, n: int) -> None:
    if k < 0:
        raise ValueError(f"k must be non-negative, got {k}")
    if k > n:
        raise ValueError(f"k={k} exceeds the node count {n}")

