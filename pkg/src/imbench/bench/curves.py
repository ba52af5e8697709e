"""Tradeoff curves, bars and dominance between curves."""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Sequence, Union

from ..diffusion import DiffusionModel, SpreadEstimate, as_model
from ..errors import AlgorithmError
from ..graph import WeightedGraph
from ..rng import RngStream
from .algorithms import is_mock

FLAWED_ROUNDS = 10_000
# streams of a sweep: selection runs, spread evaluation, flawed re-evaluation
SELECT, EVALUATE, REEVALUATE = 0, 1, 2


@dataclass(frozen=True)
class TradeoffPoint:
    parameter: float
    wall_time: float
    spread: SpreadEstimate | None
    rr_slots: int = 0
    truncated: bool = False
    seeds: tuple[int, ...] = ()

    def to_dict(self) -> dict:
        return {"parameter": self.parameter, "wall_time": self.wall_time,
                "spread": None if self.spread is None else self.spread.to_dict(),
                "rr_slots": self.rr_slots, "truncated": self.truncated, "seeds": list(self.seeds)}


@dataclass
class TradeoffCurve:
    """Points sorted by parameter; truncated points carry no spread."""

    algorithm: str
    instance: str
    k: int
    points: list[TradeoffPoint]
    budget: float = math.inf
    empty_reason: str | None = None
    # re-evaluates a point's seeds: (point, rounds) -> SpreadEstimate
    reevaluate: Callable[[TradeoffPoint, int], SpreadEstimate] | None = field(
        default=None, repr=False, compare=False)

    def __post_init__(self):
        if not self.points:
            raise ValueError("a tradeoff curve needs at least one point")
        self.points = sorted(self.points, key=lambda p: p.parameter)
        for p in self.points:
            if p.spread is not None and p.spread.rounds < 2:
                raise ValueError("curve spreads must come from at least 2 rounds")
        if self.empty_reason is None and not self.measured:
            self.empty_reason = "every grid point was truncated"

    @property
    def measured(self) -> list[TradeoffPoint]:
        return [p for p in self.points if not p.truncated and p.spread is not None]

    @property
    def is_empty(self) -> bool:
        return not self.measured

    def to_dict(self) -> dict:
        return {"algorithm": self.algorithm, "instance": self.instance, "k": self.k,
                "budget": None if math.isinf(self.budget) else self.budget,
                "empty_reason": self.empty_reason, "points": [p.to_dict() for p in self.points]}


def sweep(algorithm, g: WeightedGraph | None, model: DiffusionModel | str, k: int,
          grid: Sequence[float], budget: float, evaluation_rounds: int, rng: RngStream,
          warmup: bool = True, instance: str | None = None) -> TradeoffCurve:
    """Run ``algorithm`` at each grid value and record (time, spread).

    Only selection is timed (monotonic clock); the returned seeds are then
    evaluated with ``evaluation_rounds`` Monte-Carlo rounds on one shared
    evaluation stream. A point whose selection exceeds ``budget`` seconds
    is kept, flagged truncated, and not evaluated. One untimed warmup run
    at the first grid value precedes the timed runs. Runs never overlap.
    """
    if not len(grid):
        raise ValueError("the parameter grid is empty")
    if not budget > 0:
        raise ValueError("budget must be positive")
    if evaluation_rounds < 2:
        raise ValueError("evaluation_rounds must be at least 2")
    model = as_model(model)
    sel_rng, eval_rng = rng.child(SELECT), rng.child(EVALUATE)
    mock = is_mock(algorithm)
    if warmup and not mock:
        _select(algorithm, g, model, k, grid[0], sel_rng)
    points = []
    for param in grid:
        start = time.perf_counter()
        seeds, stats = _select(algorithm, g, model, k, param, sel_rng)
        elapsed = time.perf_counter() - start
        if mock:
            elapsed = stats.wall_time
        if elapsed > budget:
            points.append(TradeoffPoint(float(param), elapsed, None, stats.rr_slots, True, seeds.nodes))
            continue
        est = algorithm.evaluate(g, model, seeds.nodes, param, evaluation_rounds, eval_rng)
        points.append(TradeoffPoint(float(param), elapsed, est, stats.rr_slots, False, seeds.nodes))

    reeval_rng = rng.child(REEVALUATE)

    def reevaluate(point: TradeoffPoint, rounds: int) -> SpreadEstimate:
        return algorithm.evaluate(g, model, point.seeds, point.parameter, rounds, reeval_rng)

    name = instance if instance is not None else (getattr(g, "name", "") or "")
    return TradeoffCurve(algorithm.name, name, k, points, budget, reevaluate=reevaluate)


def _select(algorithm, g, model, k, param, rng):
    try:
        return algorithm.select(g, model, k, param, rng)
    except (ValueError, TypeError):
        raise
    except Exception as exc:  # noqa: BLE001 - surfaced with the algorithm name
        raise AlgorithmError(f"{algorithm.name} failed at parameter {param}: {exc}") from exc


# --------------------------------------------------------------------------
# bars


@dataclass(frozen=True)
class Sound:
    target: float


@dataclass(frozen=True)
class Flawed:
    mu_star: float
    sd_star: float


@dataclass(frozen=True)
class Bar:
    value: float
    provenance: Union[Sound, Flawed]

    def __post_init__(self):
        if isinstance(self.provenance, Flawed):
            expected = self.provenance.mu_star - self.provenance.sd_star
            if self.value != expected:
                raise ValueError("a flawed bar's value must equal mu_star - sd_star")

    @classmethod
    def sound(cls, target: float) -> Bar:
        return cls(float(target), Sound(float(target)))

    @classmethod
    def flawed(cls, mu_star: float, sd_star: float) -> Bar:
        return cls(mu_star - sd_star, Flawed(mu_star, sd_star))

    @property
    def kind(self) -> str:
        return "sound" if isinstance(self.provenance, Sound) else "flawed"

    def to_dict(self) -> dict:
        d = {"value": self.value, "kind": self.kind}
        if isinstance(self.provenance, Flawed):
            d.update(mu_star=self.provenance.mu_star, sd_star=self.provenance.sd_star)
        return d


def flawed_bar(curve: TradeoffCurve, evaluation_rounds: int = FLAWED_ROUNDS) -> Bar:
    """The criticised bar: mean minus sample sd of the curve's best point.

    The best point (largest mean) is re-evaluated with ``evaluation_rounds``
    fresh rounds when the curve can re-evaluate its seeds.
    """
    pts = curve.measured
    if not pts:
        raise ValueError(f"curve {curve.algorithm!r} has no measured point")
    best = max(pts, key=lambda p: p.spread.mean)
    est = best.spread
    if curve.reevaluate is not None:
        est = curve.reevaluate(best, evaluation_rounds)
    return Bar.flawed(est.mean, est.sample_sd)


def time_to_bar(curve: TradeoffCurve, bar: Bar | float) -> float | None:
    """Least time among points meeting the bar; ``None`` means unreachable."""
    value = bar.value if isinstance(bar, Bar) else float(bar)
    times = [p.wall_time for p in curve.measured if p.spread.mean >= value]
    return min(times) if times else None


# --------------------------------------------------------------------------
# dominance


class Verdict(str, Enum):
    DOMINATES = "Dominates"
    DOMINATED_BY = "DominatedBy"
    INCOMPARABLE = "Incomparable"


def best_within(curve: TradeoffCurve, t: float) -> float:
    """Best spread achievable within time ``t`` (step function)."""
    vals = [p.spread.mean for p in curve.measured if p.wall_time <= t]
    return max(vals) if vals else -math.inf


def _at_least_as_good(a: TradeoffCurve, b: TradeoffCurve) -> tuple[bool, bool]:
    """(a is never worse than b, a is strictly better somewhere)."""
    times = sorted({p.wall_time for c in (a, b) for p in c.measured})
    levels = sorted({p.spread.mean for c in (a, b) for p in c.measured})
    never_worse, strict = True, False
    for t in times:
        fa, fb = best_within(a, t), best_within(b, t)
        never_worse &= fa >= fb
        strict |= fa > fb
    for s in levels:
        ta, tb = time_to_bar(a, s), time_to_bar(b, s)
        ta = math.inf if ta is None else ta
        tb = math.inf if tb is None else tb
        never_worse &= ta <= tb
        strict |= ta < tb
    return never_worse, strict


def dominance(a: TradeoffCurve, b: TradeoffCurve) -> Verdict:
    """Compare the step-function envelopes of two curves."""
    if a.is_empty or b.is_empty:
        raise ValueError("dominance needs two curves with measured points")
    ab, ab_strict = _at_least_as_good(a, b)
    if ab and ab_strict:
        return Verdict.DOMINATES
    ba, ba_strict = _at_least_as_good(b, a)
    if ba and ba_strict:
        return Verdict.DOMINATED_BY
    return Verdict.INCOMPARABLE
