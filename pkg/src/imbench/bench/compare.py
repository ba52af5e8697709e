"""Comparisons between algorithms and the paired runtime test."""
from __future__ import annotations

import csv
import io
import json
import math
import time
from dataclasses import dataclass, field
from typing import Any, Sequence

import numpy as np
from scipy import stats as sps

from ..graph import WeightedGraph
from ..rng import RngStream
from .algorithms import is_mock, selection_cost
from .curves import FLAWED_ROUNDS, Bar, TradeoffCurve, Verdict, dominance, flawed_bar, sweep, time_to_bar

SCHEMA_VERSION = "imbench-report/1"
CURVE_HEADER = ["algorithm", "instance", "k", "parameter", "wall_time", "spread_mean", "spread_sd",
                "rounds", "rr_slots", "truncated"]
TIME_HEADER = ["algorithm", "bar_kind", "bar_value", "time_to_bar", "reachable"]
TTEST_HEADER = ["algorithm_a", "algorithm_b", "runs", "mean_a", "mean_b", "mean_difference",
                "t_statistic", "p_value", "significant"]


@dataclass(frozen=True)
class PairedTTest:
    t_statistic: float
    p_value: float
    mean_difference: float

    def to_dict(self) -> dict:
        return {"t_statistic": _num(self.t_statistic), "p_value": self.p_value,
                "mean_difference": self.mean_difference}


def paired_runtime_test(times_a: Sequence[float], times_b: Sequence[float]) -> PairedTTest:
    """Two-sided paired Student t-test on per-run differences ``a - b``.

    When all differences are equal the statistic is degenerate: equal
    means give t = 0, p = 1; otherwise t = +-inf, p = 0.
    """
    a, b = np.asarray(times_a, dtype=np.float64), np.asarray(times_b, dtype=np.float64)
    if a.shape != b.shape:
        raise ValueError(f"paired samples differ in length: {len(a)} vs {len(b)}")
    if len(a) < 2:
        raise ValueError("a paired t-test needs at least 2 pairs")
    d = a - b
    mean = float(d.mean())
    if np.all(d == d[0]):
        if mean == 0.0:
            return PairedTTest(0.0, 1.0, 0.0)
        return PairedTTest(math.copysign(math.inf, mean), 0.0, mean)
    res = sps.ttest_rel(a, b)
    return PairedTTest(float(res.statistic), float(res.pvalue), mean)


@dataclass
class ComparisonReport:
    """Results plus the configuration needed to reproduce them."""

    kind: str
    bars: dict[str, Bar] = field(default_factory=dict)
    times: dict[str, float | None] = field(default_factory=dict)
    ranking: list[str] = field(default_factory=list)
    dominance: dict[str, dict[str, str]] = field(default_factory=dict)
    ttest: PairedTTest | None = None
    runs: dict[str, Any] = field(default_factory=dict)
    curves: list[TradeoffCurve] = field(default_factory=list)
    config: dict = field(default_factory=dict)
    alpha: float = 0.05

    @property
    def unreachable(self) -> list[str]:
        return [a for a, t in self.times.items() if t is None]

    @property
    def all_unreachable(self) -> bool:
        return bool(self.times) and all(t is None for t in self.times.values())

    def to_dict(self) -> dict:
        d = {"schema": SCHEMA_VERSION, "kind": self.kind, "config": self.config,
             "bars": {a: b.to_dict() for a, b in self.bars.items()},
             "time_to_bar": {a: ("unreachable" if t is None else t) for a, t in self.times.items()},
             "ranking": self.ranking, "dominance": self.dominance,
             "curves": [c.to_dict() for c in self.curves], "runs": self.runs}
        if self.ttest is not None:
            d["ttest"] = self.ttest.to_dict() | {"alpha": self.alpha,
                                                 "significant": self.ttest.p_value <= self.alpha}
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=False)

    def curves_csv(self) -> str:
        return curves_csv(self.curves)

    def times_csv(self) -> str:
        out = io.StringIO()
        w = csv.writer(out, lineterminator="\n")
        w.writerow(TIME_HEADER)
        for a, t in self.times.items():
            bar = self.bars.get(a)
            w.writerow([a, bar.kind if bar else "", bar.value if bar else "",
                        "" if t is None else t, t is not None])
        return out.getvalue()

    def ttest_csv(self) -> str:
        out = io.StringIO()
        w = csv.writer(out, lineterminator="\n")
        w.writerow(TTEST_HEADER)
        if self.ttest is not None:
            names = self.runs.get("algorithms", ["", ""])
            ca, cb = self.runs.get("cost_a", []), self.runs.get("cost_b", [])
            w.writerow([names[0], names[1], len(ca), float(np.mean(ca)), float(np.mean(cb)),
                        self.ttest.mean_difference, self.ttest.t_statistic, self.ttest.p_value,
                        self.ttest.p_value <= self.alpha])
        return out.getvalue()

    def summary(self) -> str:
        lines = [f"{self.kind} comparison"]
        for a in self.ranking or self.times:
            bar = self.bars.get(a)
            t = self.times.get(a)
            shown = "unreachable" if t is None else f"{t:.6g}"
            bar_txt = f" bar={bar.value:.6g} ({bar.kind})" if bar else ""
            lines.append(f"  {a}:{bar_txt} time_to_bar={shown}")
        for a, row in self.dominance.items():
            for b, v in row.items():
                if v == Verdict.DOMINATES.value:
                    lines.append(f"  {a} dominates {b}")
        if self.ttest is not None:
            t = self.ttest
            verdict = "significant" if t.p_value <= self.alpha else "not significant"
            names = self.runs.get("algorithms", ["A", "B"])
            lines.append(f"  paired t-test {names[0]} vs {names[1]}: t={t.t_statistic:.4g} "
                         f"p={t.p_value:.4g} mean_diff={t.mean_difference:.6g} ({verdict} at {self.alpha})")
        return "\n".join(lines)


def curves_csv(curves: Sequence[TradeoffCurve]) -> str:
    out = io.StringIO()
    w = csv.writer(out, lineterminator="\n")
    w.writerow(CURVE_HEADER)
    for c in curves:
        for p in c.points:
            s = p.spread
            w.writerow([c.algorithm, c.instance, c.k, p.parameter, p.wall_time,
                        "" if s is None else s.mean, "" if s is None else s.sample_sd,
                        "" if s is None else s.rounds, p.rr_slots, p.truncated])
    return out.getvalue()


def _num(x: float):
    return x if math.isfinite(x) else ("inf" if x > 0 else "-inf")


def dominance_matrix(curves: Sequence[TradeoffCurve]) -> dict[str, dict[str, str]]:
    out: dict[str, dict[str, str]] = {}
    for a in curves:
        for b in curves:
            if a is b or a.is_empty or b.is_empty:
                continue
            out.setdefault(a.algorithm, {})[b.algorithm] = dominance(a, b).value
    return out


def _rank(times: dict[str, float | None], dom: dict[str, dict[str, str]]) -> list[str]:
    # a dominator never ranks below what it dominates: among equal times,
    # fewer dominators first
    def dominated_by(a: str) -> int:
        return sum(1 for row in dom.values() if row.get(a) == Verdict.DOMINATES.value)
    return sorted(times, key=lambda a: (math.inf if times[a] is None else times[a], dominated_by(a), a))


def _check_curves(curves: Sequence[TradeoffCurve], least: int) -> None:
    if len(curves) < least:
        raise ValueError(f"need at least {least} curve(s), got {len(curves)}")
    names = [c.algorithm for c in curves]
    if len(set(names)) != len(names):
        raise ValueError("curves must have distinct algorithm names")


def sound_compare(curves: Sequence[TradeoffCurve], target_spread: float,
                  config: dict | None = None) -> ComparisonReport:
    """Every algorithm is held to the same bar; rank by time to reach it."""
    _check_curves(curves, 1)
    bar = Bar.sound(target_spread)
    times = {c.algorithm: time_to_bar(c, bar) for c in curves}
    dom = dominance_matrix(curves)
    return ComparisonReport("sound", {c.algorithm: bar for c in curves}, times, _rank(times, dom),
                            dom, curves=list(curves), config=dict(config or {}))


def flawed_compare(curves: Sequence[TradeoffCurve], evaluation_rounds: int = FLAWED_ROUNDS,
                   config: dict | None = None) -> ComparisonReport:
    """Replica of the criticised protocol: each algorithm gets its own bar
    ``mu* - sd*`` from its own best point. Kept for demonstration only."""
    _check_curves(curves, 1)
    bars = {c.algorithm: flawed_bar(c, evaluation_rounds) for c in curves if not c.is_empty}
    times = {c.algorithm: (time_to_bar(c, bars[c.algorithm]) if c.algorithm in bars else None)
             for c in curves}
    dom = dominance_matrix(curves)
    ranking = sorted(times, key=lambda a: (math.inf if times[a] is None else times[a], a))
    return ComparisonReport("flawed", bars, times, ranking, dom, curves=list(curves),
                            config=dict(config or {}))


def shared_seed_experiment(algo_a, algo_b, g: WeightedGraph | None, model, k: int, param,
                           run_count: int = 10, rng: RngStream | None = None,
                           cost: str = "wall", alpha: float = 0.05,
                           config: dict | None = None) -> ComparisonReport:
    """Run both algorithms once per master seed, one run at a time.

    Run ``i`` of both algorithms gets stream ``rng.child(i)``. ``cost`` is
    ``"wall"`` (measured selection time) or ``"evaluations"`` (a
    deterministic work count). Mocks always charge their declared time.
    """
    if run_count < 2:
        raise ValueError("run_count must be at least 2")
    if rng is None:
        raise ValueError("shared_seed_experiment needs an explicit rng")
    if cost not in ("wall", "evaluations"):
        raise ValueError("cost must be 'wall' or 'evaluations'")
    params = param if isinstance(param, (tuple, list)) else (param, param)
    for algo, p in zip((algo_a, algo_b), params):
        if not is_mock(algo):
            algo.select(g, model, k, p, rng.child(run_count))  # untimed warmup
    costs = ([], [])
    same_seeds = []
    for i in range(run_count):
        run_rng = rng.child(i)
        picked = []
        for j, (algo, p) in enumerate(zip((algo_a, algo_b), params)):
            start = time.perf_counter()
            seeds, st = algo.select(g, model, k, p, run_rng)
            elapsed = time.perf_counter() - start
            if is_mock(algo):
                c = st.wall_time
            else:
                c = elapsed if cost == "wall" else selection_cost(st)
            costs[j].append(c)
            picked.append(seeds.nodes)
        same_seeds.append(picked[0] == picked[1])
    test = paired_runtime_test(costs[0], costs[1])
    runs = {"algorithms": [algo_a.name, algo_b.name], "cost": cost, "run_count": run_count,
            "seeds": [rng.child(i).to_dict() for i in range(run_count)],
            "cost_a": costs[0], "cost_b": costs[1], "identical_seed_sets": same_seeds}
    return ComparisonReport("shared-seed", ttest=test, runs=runs, config=dict(config or {}),
                            alpha=alpha)


def tune_parameter(algorithm, tuning_set: Sequence[tuple[str, WeightedGraph]], model, k: int,
                   grid: Sequence[float], budget: float, evaluation_rounds: int, rng: RngStream,
                   tolerance: float = 0.05) -> tuple[float, list[TradeoffCurve]]:
    """Pick one parameter on an explicit tuning set and freeze it.

    The chosen value is the cheapest grid value (total time over the set)
    whose spread is within ``tolerance`` of the best spread seen on every
    tuning instance.
    """
    if not tuning_set:
        raise ValueError("the tuning set is empty")
    curves = [sweep(algorithm, g, model, k, grid, budget, evaluation_rounds, rng.child(i), instance=name)
              for i, (name, g) in enumerate(tuning_set)]
    best = {}
    for param in sorted(float(x) for x in grid):
        total, ok = 0.0, True
        for c in curves:
            pt = next(p for p in c.points if p.parameter == param)
            top = max((p.spread.mean for p in c.measured), default=-math.inf)
            if pt.truncated or pt.spread.mean < (1 - tolerance) * top:
                ok = False
                break
            total += pt.wall_time
        if ok:
            best[param] = total
    if not best:
        raise ValueError("no grid value is acceptable on every tuning instance")
    return min(best, key=lambda p: (best[p], p)), curves
