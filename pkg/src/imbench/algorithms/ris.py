"""RIS seed selection with fixed, TIM+ and IMM sample-size policies.

The TIM+ and IMM sample sizes follow the original publications:

* TIM+: Tang, Xiao, Shi, "Influence Maximization: Near-Optimal Time
  Complexity Meets Practical Efficiency", SIGMOD 2014 (KPT estimation,
  Alg. 2; refinement, Alg. 3; lambda from Thm. 1 / Eq. 4).
* IMM: Tang, Shi, Xiao, "Influence Maximization in Near-Linear Time: A
  Martingale Approach", SIGMOD 2015 (Alg. 2 sampling, Thm. 1 / Eq. 6).

Both take ``ell <- ell * (1 + ln 2 / ln n)`` so that the whole run, not
each of its two phases, succeeds with probability ``1 - n^-ell``.

IMM's final RR-sets are drawn fresh instead of reusing the sets from the
lower-bound phase (the reuse in the original algorithm breaks the
martingale argument; fresh sets restore it at a small cost).

Streams: estimation phases use ``rng.child(0)``, the final sample uses
``rng.child(1)`` and the TIM+ refinement sample uses ``rng.child(2)``.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Union

import numpy as np

from ..diffusion import DiffusionModel, as_model, check_graph
from ..errors import ResourceCapError
from ..graph import WeightedGraph
from ..rng import RngStream
from .common import SeedSet, SelectionStats, check_k
from .rrsets import RRIndex, max_coverage, memory_cap_slots, sample_rr_sets

ESTIMATION, FINAL, REFINEMENT = 0, 1, 2


@dataclass(frozen=True)
class Fixed:
    theta: int

    def __post_init__(self):
        if int(self.theta) < 1:
            raise ValueError("theta must be at least 1")


@dataclass(frozen=True)
class TimPlus:
    epsilon: float
    ell: float = 1.0

    def __post_init__(self):
        _check_eps_ell(self.epsilon, self.ell)


@dataclass(frozen=True)
class Imm:
    epsilon: float
    ell: float = 1.0

    def __post_init__(self):
        _check_eps_ell(self.epsilon, self.ell)


SamplePolicy = Union[Fixed, TimPlus, Imm]


def _check_eps_ell(eps: float, ell: float) -> None:
    if not eps > 0:
        raise ValueError(f"epsilon must be positive, got {eps}")
    if not ell > 0:
        raise ValueError(f"ell must be positive, got {ell}")


def parse_policy(text: str) -> SamplePolicy:
    """``fixed:10000``, ``timplus:0.1``, ``imm:0.1`` or ``imm:0.1,ell=2``."""
    name, _, rest = text.partition(":")
    name = name.strip().lower()
    parts = [s.strip() for s in rest.split(",") if s.strip()]
    if name == "fixed":
        if len(parts) != 1:
            raise ValueError("fixed policy takes exactly one theta")
        return Fixed(int(parts[0]))
    if name in ("timplus", "tim+", "tim", "imm"):
        if not parts:
            raise ValueError(f"{name} policy needs an explicit epsilon")
        eps = float(parts[0])
        ell = 1.0
        for extra in parts[1:]:
            key, _, val = extra.partition("=")
            if key.strip() != "ell":
                raise ValueError(f"unknown policy option {key!r}")
            ell = float(val)
        return Imm(eps, ell) if name == "imm" else TimPlus(eps, ell)
    raise ValueError(f"unknown sample policy {text!r}")


def policy_dict(policy: SamplePolicy) -> dict:
    if isinstance(policy, Fixed):
        return {"variant": "Fixed", "theta": int(policy.theta)}
    return {"variant": type(policy).__name__, "epsilon": policy.epsilon, "ell": policy.ell}


def log_comb(n: int, k: int) -> float:
    """ln C(n, k)."""
    if not 0 <= k <= n:
        raise ValueError("need 0 <= k <= n")
    return math.lgamma(n + 1) - math.lgamma(k + 1) - math.lgamma(n - k + 1)


@dataclass
class ThetaPlan:
    theta: int
    trace: dict = field(default_factory=dict)


class _Sampler:
    """Grows one RR-set sample from a stream, keeping track of storage."""

    def __init__(self, g, model, rng: RngStream, cap: int, used: list):
        self.g, self.model, self.rng, self.cap, self.used = g, model, rng, cap, used
        self.index = RRIndex.empty(g.node_count, model.value)

    def extend_to(self, total: int) -> RRIndex:
        extra = total - self.index.theta
        if extra > 0:
            new = sample_rr_sets(self.g, self.model, extra, self.rng, start=self.index.theta,
                                 cap_slots=self.cap - self.used[0])
            self.used[0] += new.storage
            self.index = self.index.concat(new)
        return self.index


def _adjusted_ell(ell: float, n: int) -> float:
    return ell * (1.0 + math.log(2) / math.log(n))


def _tim_theta(g: WeightedGraph, model: DiffusionModel, k: int, policy: TimPlus, rng: RngStream,
               cap: int, used: list) -> ThetaPlan:
    n, m = g.node_count, g.arc_count
    eps = policy.epsilon
    ell = _adjusted_ell(policy.ell, n)
    ln_n = math.log(n)
    # KPT estimation: kappa(R) = 1 - (1 - w(R)/m)^k, w(R) = arcs entering R
    sampler = _Sampler(g, model, rng.child(ESTIMATION), cap, used)
    indeg = g.indegree.astype(np.float64)
    kpt_star, last = 1.0, None
    rounds = max(1, int(math.log2(n)) - 1)
    drawn = 0
    for i in range(1, rounds + 1):
        c_i = math.ceil((6 * ell * ln_n + 6 * math.log(math.log2(n))) * 2 ** i)
        index = sampler.extend_to(drawn + c_i)
        ptr = index.ptr[drawn:]
        width = np.add.reduceat(indeg[index.nodes], ptr[:-1]) if m else np.zeros(c_i)
        kappa = 1.0 - (1.0 - width / m) ** k if m else np.zeros(c_i)
        total = float(kappa.sum())
        last = (drawn, drawn + c_i)
        drawn += c_i
        if total / c_i > 1.0 / 2 ** i:
            kpt_star = n * total / (2.0 * c_i)
            break
    # refinement with the greedy seeds of the last estimation batch
    lo, hi = last
    idx = sampler.index
    batch = RRIndex(idx.ptr[lo:hi + 1] - idx.ptr[lo], idx.nodes[idx.ptr[lo]:idx.ptr[hi]], n)
    seeds = max_coverage(batch, k).nodes
    eps_r = 5.0 * (ell * eps ** 2 / (k + ell)) ** (1.0 / 3.0)
    lam_r = (2.0 + eps_r) * ell * n * ln_n / eps_r ** 2
    theta_r = math.ceil(lam_r / kpt_star)
    refine = _Sampler(g, model, rng.child(REFINEMENT), cap, used).extend_to(theta_r)
    f = refine.coverage(seeds)
    kpt_plus = max(f * n / (1.0 + eps_r), kpt_star)
    lam = (8.0 + 2.0 * eps) * n * (ell * ln_n + log_comb(n, k) + math.log(2)) / eps ** 2
    theta = math.ceil(lam / kpt_plus)
    return ThetaPlan(theta, {"kpt_star": kpt_star, "kpt_plus": kpt_plus, "lambda": lam,
                             "estimation_sets": drawn, "refinement_sets": theta_r,
                             "ell_adjusted": ell})


def _imm_theta(g: WeightedGraph, model: DiffusionModel, k: int, policy: Imm, rng: RngStream,
               cap: int, used: list) -> ThetaPlan:
    n = g.node_count
    eps = policy.epsilon
    ell = _adjusted_ell(policy.ell, n)
    ln_n = math.log(n)
    lcomb = log_comb(n, k)
    eps_p = math.sqrt(2.0) * eps
    lam_p = ((2.0 + 2.0 * eps_p / 3.0) * (lcomb + ell * ln_n + math.log(math.log2(n))) * n
             / eps_p ** 2)
    sampler = _Sampler(g, model, rng.child(ESTIMATION), cap, used)
    lb = 1.0
    for i in range(1, max(1, int(math.log2(n)))):
        x = n / 2.0 ** i
        index = sampler.extend_to(math.ceil(lam_p / x))
        seeds = max_coverage(index, k)
        frac = seeds.info["covered"] / index.theta
        if n * frac >= (1.0 + eps_p) * x:
            lb = n * frac / (1.0 + eps_p)
            break
    e1 = 1.0 - 1.0 / math.e
    alpha = math.sqrt(ell * ln_n + math.log(2))
    beta = math.sqrt(e1 * (lcomb + ell * ln_n + math.log(2)))
    lam_star = 2.0 * n * (e1 * alpha + beta) ** 2 / eps ** 2
    theta = math.ceil(lam_star / lb)
    return ThetaPlan(theta, {"lower_bound": lb, "lambda_star": lam_star, "lambda_prime": lam_p,
                             "estimation_sets": sampler.index.theta, "ell_adjusted": ell})


def theta_for(policy: SamplePolicy, g: WeightedGraph, model: DiffusionModel | str, k: int,
              rng: RngStream, cap_slots: int | None = None) -> ThetaPlan:
    """Number of final RR-sets the policy asks for on this instance."""
    model = as_model(model)
    check_graph(g, model)
    cap = memory_cap_slots() if cap_slots is None else cap_slots
    if isinstance(policy, Fixed):
        return ThetaPlan(int(policy.theta), {})
    check_k(k, g.node_count)
    if k < 1:
        raise ValueError("k must be at least 1")
    if g.node_count < 2:
        return ThetaPlan(1, {"trivial": True})
    used = [0]
    if isinstance(policy, TimPlus):
        plan = _tim_theta(g, model, k, policy, rng, cap, used)
    elif isinstance(policy, Imm):
        plan = _imm_theta(g, model, k, policy, rng, cap, used)
    else:
        raise TypeError(f"not a sample policy: {policy!r}")
    plan.trace["estimation_slots"] = used[0]
    return plan


def ris_select(g: WeightedGraph, model: DiffusionModel | str, k: int, policy: SamplePolicy,
               rng: RngStream, memory_cap: int | None = None) -> tuple[SeedSet, RRIndex, SelectionStats]:
    """Sample theta RR-sets per ``policy`` and return their greedy max cover.

    ``memory_cap`` is in bytes; storage beyond it is refused with
    :class:`ResourceCapError` rather than attempted.
    """
    model = as_model(model)
    check_graph(g, model)
    if k < 1:
        raise ValueError("k must be at least 1")
    check_k(k, g.node_count)
    cap = memory_cap_slots(memory_cap)
    start = time.perf_counter()
    plan = theta_for(policy, g, model, k, rng, cap)
    if plan.theta > cap:
        raise ResourceCapError(
            f"policy asks for theta={plan.theta} RR-sets, above the storage cap of {cap} node-slots "
            f"({cap * 8} bytes); raise the cap or relax epsilon")
    index = sample_rr_sets(g, model, plan.theta, rng.child(FINAL), cap_slots=cap)
    seeds = max_coverage(index, k)
    stats = SelectionStats(evaluations=0, wall_time=time.perf_counter() - start,
                           theta=index.theta, rr_slots=index.storage)
    stats.extra.update(plan.trace)
    stats.extra["policy"] = policy_dict(policy)
    stats.extra["zero_coverage"] = seeds.info["zero_coverage"]
    seeds.info.update(stats.extra)
    return seeds, index, stats
