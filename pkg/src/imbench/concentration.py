"""Monte-Carlo sample sizes from Chebyshev's inequality and a Chernoff bound.

For samples in [0, 1] with mean ``mu`` and standard deviation ``sigma``,
the sample mean is within relative error ``epsilon`` of ``mu`` with
probability at least ``1 - delta`` once

    Chebyshev:  n >= sigma^2 / (delta * epsilon^2 * mu^2)
    Chernoff:   n >= 3 ln(2 / delta) / (epsilon^2 * mu)

The Chernoff size is the smaller one whenever
``3 * delta * mu * ln(2 / delta) <= sigma^2``.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

TABLE1_EPSILONS = (0.05, 0.1, 0.15, 0.2, 0.25, 0.3, 0.35, 0.4)

# Bounds such as 1/(1e-3 * 0.05^2 * 4) land a few ulps above an exact
# integer; a relative slack far below any meaningful sample count keeps
# the ceiling from adding a spurious extra sample.
_CEIL_SLACK = 1e-12


@dataclass(frozen=True)
class SampleSizeRequest:
    mu: float
    sigma: float
    epsilon: float
    delta: float

    def __post_init__(self):
        if not 0 < self.mu <= 1:
            raise ValueError(f"mu must lie in (0, 1], got {self.mu}")
        if not self.sigma >= 0:
            raise ValueError(f"sigma must be non-negative, got {self.sigma}")
        if not self.epsilon > 0:
            raise ValueError(f"epsilon must be positive, got {self.epsilon}")
        if not 0 < self.delta < 1:
            raise ValueError(f"delta must lie in (0, 1), got {self.delta}")


def _ceil(x: float) -> int:
    return math.ceil(x * (1.0 - _CEIL_SLACK))


def chebyshev_samples(req: SampleSizeRequest) -> int:
    bound = req.sigma ** 2 / (req.delta * req.epsilon ** 2 * req.mu ** 2)
    return max(1, _ceil(bound))


def chernoff_samples(req: SampleSizeRequest) -> int:
    bound = 3.0 * math.log(2.0 / req.delta) / (req.epsilon ** 2 * req.mu)
    return max(1, _ceil(bound))


@dataclass(frozen=True)
class SampleSizeRow:
    epsilon: float
    chebyshev_n: int
    chernoff_n: int


def sample_size_table(mu: float, sigma: float, delta: float,
                      epsilons: Iterable[float] = TABLE1_EPSILONS) -> list[SampleSizeRow]:
    """One row per epsilon, sorted by epsilon."""
    eps = sorted(float(e) for e in epsilons)
    if not eps:
        raise ValueError("need at least one epsilon")
    rows = []
    for e in eps:
        req = SampleSizeRequest(mu, sigma, e, delta)
        rows.append(SampleSizeRow(e, chebyshev_samples(req), chernoff_samples(req)))
    return rows


def table_csv(rows: Sequence[SampleSizeRow]) -> str:
    out = io.StringIO()
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["epsilon", "chebyshev_n", "chernoff_n"])
    for r in rows:
        w.writerow([repr(r.epsilon), r.chebyshev_n, r.chernoff_n])
    return out.getvalue()
