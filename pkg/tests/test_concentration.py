import math
from fractions import Fraction

import mpmath
import pytest
from hypothesis import assume, given, strategies as st

from imbench.concentration import (TABLE1_EPSILONS, SampleSizeRequest, chebyshev_samples,
                                   chernoff_samples, sample_size_table, table_csv)

# reference sample sizes for mu = sigma = 1/2, delta = 1e-3
TABLE1 = {
    0.05: (400000, 18243), 0.1: (100000, 4561), 0.15: (44445, 2027), 0.2: (25000, 1141),
    0.25: (16000, 730), 0.3: (11112, 507), 0.35: (8164, 373), 0.4: (6250, 286),
}


def _req(eps, mu=0.5, sigma=0.5, delta=1e-3):
    return SampleSizeRequest(mu, sigma, eps, delta)


@pytest.mark.parametrize("eps", TABLE1_EPSILONS)
def test_table1_cells(eps):
    assert (chebyshev_samples(_req(eps)), chernoff_samples(_req(eps))) == TABLE1[eps]


def test_table_matches_whole_table():
    rows = sample_size_table(0.5, 0.5, 1e-3)
    assert [(r.epsilon, r.chebyshev_n, r.chernoff_n) for r in rows] == [(e, *TABLE1[e]) for e in TABLE1_EPSILONS]


def _cheb_oracle(mu, sigma, eps, delta):
    # exact rational arithmetic on the decimal inputs
    f = Fraction
    x = f(str(sigma)) ** 2 / (f(str(delta)) * f(str(eps)) ** 2 * f(str(mu)) ** 2)
    return max(1, math.ceil(x))


def _chern_oracle(mu, eps, delta):
    with mpmath.workdps(50):
        x = 3 * mpmath.log(2 / mpmath.mpf(str(delta))) / (mpmath.mpf(str(eps)) ** 2 * mpmath.mpf(str(mu)))
        return max(1, int(mpmath.ceil(x)))


def test_half_epsilon_row_derived():
    # [DERIVED] exact rational / 50-digit evaluation
    assert chebyshev_samples(_req(0.5)) == _cheb_oracle(0.5, 0.5, 0.5, 1e-3) == 4000
    assert chernoff_samples(_req(0.5)) == _chern_oracle(0.5, 0.5, 1e-3) == 183


decimals = st.decimals(min_value="0.01", max_value="1", places=2).map(float)


@given(decimals, decimals, st.sampled_from([0.05, 0.1, 0.2, 0.3, 0.7]), st.sampled_from([1e-3, 0.01, 0.05, 0.2]))
def test_calculators_match_exact_oracles(mu, sigma, eps, delta):
    assert chebyshev_samples(SampleSizeRequest(mu, sigma, eps, delta)) == _cheb_oracle(mu, sigma, eps, delta)
    assert chernoff_samples(SampleSizeRequest(mu, sigma, eps, delta)) == _chern_oracle(mu, eps, delta)


def test_zero_variance_and_huge_epsilon_clamp():
    assert chebyshev_samples(SampleSizeRequest(0.5, 0.0, 0.1, 1e-3)) == 1
    rows = sample_size_table(0.5, 0.5, 1e-3, [1e9])
    assert (rows[0].chebyshev_n, rows[0].chernoff_n) == (1, 1)


def test_table_single_and_sorted_and_csv():
    assert len(sample_size_table(0.5, 0.5, 1e-3, [0.2])) == 1
    rows = sample_size_table(0.5, 0.5, 1e-3, [0.4, 0.05])
    assert [r.epsilon for r in rows] == [0.05, 0.4]
    text = table_csv(rows)
    assert text.splitlines()[0] == "epsilon,chebyshev_n,chernoff_n"
    assert text.splitlines()[1] == "0.05,400000,18243"
    with pytest.raises(ValueError):
        sample_size_table(0.5, 0.5, 1e-3, [])


@pytest.mark.parametrize("kwargs", [dict(mu=0.0), dict(mu=1.5), dict(sigma=-0.1), dict(epsilon=0.0),
                                    dict(delta=0.0), dict(delta=1.0)])
def test_request_validation(kwargs):
    base = dict(mu=0.5, sigma=0.5, epsilon=0.1, delta=1e-3) | kwargs
    with pytest.raises(ValueError):
        SampleSizeRequest(**base)


@given(st.floats(0.01, 1), st.floats(0, 1), st.floats(1e-3, 1), st.floats(1e-6, 0.5))
def test_crossover(mu, sigma, eps, delta):
    assume(3 * delta * mu * math.log(2 / delta) <= sigma ** 2)
    req = SampleSizeRequest(mu, sigma, eps, delta)
    assert chernoff_samples(req) <= chebyshev_samples(req)


@given(st.floats(0.05, 1), st.floats(0.05, 1), st.floats(0.01, 0.3), st.floats(1e-4, 0.3))
def test_inverse_square_scaling(mu, sigma, eps, delta):
    for fn in (chebyshev_samples, chernoff_samples):
        big, small = fn(SampleSizeRequest(mu, sigma, eps, delta)), fn(SampleSizeRequest(mu, sigma, 2 * eps, delta))
        assume(small > 50)
        # ceilings move each count by less than 1
        assert abs(big / small - 4) <= 4 / small + 1 / small


@given(st.floats(0.05, 1), st.floats(0.05, 1), st.floats(0.01, 1), st.floats(0.01, 1),
       st.floats(1e-4, 0.5), st.floats(1e-4, 0.5))
def test_monotone_in_eps_and_delta(mu, sigma, e1, e2, d1, d2):
    e1, e2 = sorted((e1, e2))
    d1, d2 = sorted((d1, d2))
    for fn in (chebyshev_samples, chernoff_samples):
        assert fn(SampleSizeRequest(mu, sigma, e1, d1)) >= fn(SampleSizeRequest(mu, sigma, e2, d1))
        assert fn(SampleSizeRequest(mu, sigma, e1, d1)) >= fn(SampleSizeRequest(mu, sigma, e1, d2))
