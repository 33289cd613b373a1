import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from randsieve import (
    Pmf,
    exact_moments,
    ks_exact_vs_normal,
    lindeberg_sum,
    normal_cdf,
    poisson_binomial_pmf,
    sieve_primes,
)
from randsieve.exact import default_support_cap

from .oracles import enumerate_pmf, primes_trial

# Phi(1.96) and Phi(2.5) by adaptive quadrature of the normal density (mpmath, 30 digits)
PHI_1_96 = 0.975002104851779563787176307604
PHI_2_5 = 0.993790334674223864833021895426

_TABLE = sieve_primes(10**5)


def test_moments_small(table):
    m = exact_moments(table, 3)
    assert m.mu == pytest.approx(5 / 6, rel=1e-15)
    assert m.sigma_sq == pytest.approx(17 / 36, rel=1e-15)
    assert m.loglog_x == pytest.approx(math.log(math.log(3)))
    assert m.mertens_gap == pytest.approx(5 / 6 - math.log(math.log(3)))
    assert m.zeta_partial == pytest.approx(1 / 4 + 1 / 9)

    with pytest.raises(ValueError):
        exact_moments(table, 2)
    m2 = exact_moments(table, 2, allow_small=True)
    assert (m2.mu, m2.sigma_sq, m2.loglog_x, m2.mertens_gap) == (0.5, 0.25, None, None)


def test_moments_large(table):
    m6, m7 = exact_moments(table, 10**6), exact_moments(table, 10**7)
    assert abs(m6.sigma_sq - (m6.mu - m6.zeta_partial)) <= 1e-12
    assert abs(m6.mertens_gap - m7.mertens_gap) < 0.01
    with pytest.raises(ValueError):
        exact_moments(table, 10**7 + 1)


@pytest.mark.parametrize("x", [3, 10, 100, 10**3, 10**4, 10**5])
def test_moment_report_invariants(table, x):
    m = exact_moments(table, x)
    assert abs(m.sigma_sq - (m.mu - m.zeta_partial)) <= 1e-12
    assert 0 < m.sigma_sq < m.mu


def test_pmf_examples(table):
    p3 = poisson_binomial_pmf(table, 3)
    np.testing.assert_allclose(p3.mass[:3], [1 / 3, 1 / 2, 1 / 6], rtol=0, atol=1e-15)
    p5 = poisson_binomial_pmf(table, 5)
    assert p5.mass[0] == pytest.approx(4 / 15, abs=1e-15)
    assert p5.mass[3] == pytest.approx(1 / 30, abs=1e-15)


@pytest.mark.parametrize("x", range(2, 14))
def test_pmf_matches_enumeration(table, x):
    exact = [float(v) for v in enumerate_pmf(primes_trial(x))]
    pmf = poisson_binomial_pmf(table, x)
    got = pmf.mass[: len(exact)]
    assert np.max(np.abs(got - exact)) <= 1e-12
    assert np.all(pmf.mass[len(exact) :] == 0)


def test_pmf_truncation_conserves_mass(table):
    with pytest.warns(RuntimeWarning):
        pmf = poisson_binomial_pmf(table, 13, support_cap=2)
    exact = [float(v) for v in enumerate_pmf(primes_trial(13))]
    np.testing.assert_allclose(pmf.mass, exact[:3], atol=1e-12)
    assert pmf.truncated_tail == pytest.approx(sum(exact[3:]), abs=1e-12)
    assert abs(pmf.mass.sum() + pmf.truncated_tail - 1) <= 1e-12


def test_pmf_tail_warning(table):
    with pytest.warns(RuntimeWarning, match="support_cap"):
        pmf = poisson_binomial_pmf(table, 1000, support_cap=3)
    assert pmf.tail_warning
    with pytest.raises(ValueError, match="truncated_tail"):
        ks_exact_vs_normal(pmf, 2.0, 1.0)
    with pytest.raises(ValueError):
        poisson_binomial_pmf(table, 100, support_cap=0)


@pytest.mark.parametrize("x", [100, 10**4, 10**6])
def test_pmf_moments_match(table, x):
    pmf = poisson_binomial_pmf(table, x)
    m = exact_moments(table, x)
    assert pmf.support_cap == default_support_cap(m.mu, m.sigma)
    assert pmf.truncated_tail <= 1e-12
    assert abs(pmf.mass.sum() + pmf.truncated_tail - 1) <= 1e-12
    assert np.all(pmf.mass >= 0)
    assert abs(pmf.mean() - m.mu) <= 1e-9
    assert abs(pmf.variance() - m.sigma_sq) <= 1e-9


def test_lindeberg_examples(table):
    assert lindeberg_sum(table, 100, 1.0) == 0.0
    assert lindeberg_sum(table, 3, 0.1) == 1.0
    with pytest.raises(ValueError):
        lindeberg_sum(table, 100, 0.0)
    with pytest.raises(ValueError):
        lindeberg_sum(table, 2, 0.5)


def _lindeberg_enumerated(x, eps):
    # direct expectation over the two values of each centred summand
    ps = primes_trial(x)
    var = sum((1 / p) * (1 - 1 / p) for p in ps)
    s = math.sqrt(var)
    num = 0.0
    for p in ps:
        q = 1 / p
        for value, prob in ((1 - q, q), (-q, 1 - q)):
            if abs(value) > eps * s:
                num += prob * value * value
    return num / var


@pytest.mark.parametrize("x", [3, 5, 30, 100, 1000])
@pytest.mark.parametrize("eps", [0.01, 0.1, 0.3, 0.5, 0.7, 1.0])
def test_lindeberg_matches_enumeration(table, x, eps):
    assert lindeberg_sum(table, x, eps) == pytest.approx(_lindeberg_enumerated(x, eps), abs=1e-12)


@settings(max_examples=150, deadline=None)
@given(st.integers(3, 10**5), st.floats(1e-4, 5.0), st.floats(1e-4, 5.0))
def test_lindeberg_properties(x, e1, e2):
    lo, hi = sorted((e1, e2))
    a, b = lindeberg_sum(_TABLE, x, lo), lindeberg_sum(_TABLE, x, hi)
    assert 0.0 <= b <= a <= 1.0
    sigma = exact_moments(_TABLE, x).sigma
    if hi * sigma >= 1:
        assert b == 0.0


def test_normal_cdf_values():
    assert normal_cdf(0.0) == 0.5
    assert abs(normal_cdf(1.96) - PHI_1_96) <= 1e-10
    assert abs(normal_cdf(2.5) - PHI_2_5) <= 1e-10
    arr = normal_cdf(np.array([0.0, 1.96, 2.5]))
    np.testing.assert_allclose(arr, [0.5, PHI_1_96, PHI_2_5], rtol=0, atol=1e-10)


@settings(max_examples=300)
@given(st.floats(-40, 40), st.floats(-40, 40))
def test_normal_cdf_properties(a, b):
    assert abs(normal_cdf(a) + normal_cdf(-a) - 1) <= 1e-12
    lo, hi = sorted((a, b))
    assert normal_cdf(lo) <= normal_cdf(hi)


def test_ks_exact_point_mass():
    pmf = Pmf(x=3, support_cap=4, mass=np.array([0.0, 0.0, 1.0, 0.0, 0.0]), truncated_tail=0.0)
    assert ks_exact_vs_normal(pmf, 2.0, 1.0) == 0.5
    with pytest.raises(ValueError):
        ks_exact_vs_normal(pmf, 2.0, 0.0)


def test_ks_exact_against_dense_grid(table):
    # brute-force sup over a fine grid never exceeds the edge-evaluated value
    x = 1000
    pmf = poisson_binomial_pmf(table, x)
    m = exact_moments(table, x)
    d = ks_exact_vs_normal(pmf, m.mu, m.sigma)
    t = np.linspace(-6, 12, 200_001)
    k = np.floor(t * m.sigma + m.mu + 1e-12).astype(int)
    cdf = np.concatenate(([0.0], np.cumsum(pmf.mass)))[np.clip(k + 1, 0, len(pmf.mass))]
    grid_d = np.max(np.abs(cdf - normal_cdf(t)))
    assert grid_d <= d + 1e-12
    assert d - grid_d < 1e-3


def test_ks_exact_trend(table):
    ds = []
    for x in [10**2, 10**3, 10**4, 10**5, 10**6]:
        m = exact_moments(table, x)
        d = ks_exact_vs_normal(poisson_binomial_pmf(table, x), m.mu, m.sigma)
        assert 0 <= d <= 1
        ds.append(d)
    assert all(b <= a for a, b in zip(ds, ds[1:]))
