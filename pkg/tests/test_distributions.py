"""Distribution kernel against scipy as an independent oracle, plus sampler
goodness-of-fit and stream determinism."""

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import stats as sps

from implaus.distributions import (
    Beta,
    Binomial,
    ChiSquared,
    Normal,
    ParameterDomainError,
    Uniform01,
    make_rng,
)

unit = st.floats(min_value=1e-6, max_value=1 - 1e-6)


# ---- cdf agreement with scipy --------------------------------------------

@pytest.mark.parametrize("mean,sd", [(0.0, 1.0), (2.5, 0.3), (-1.0, 4.0)])
def test_normal_cdf_matches_scipy(mean, sd):
    d = Normal(mean, sd)
    for x in np.linspace(mean - 5 * sd, mean + 5 * sd, 41):
        assert d.cdf(x) == pytest.approx(sps.norm.cdf(x, mean, sd), abs=1e-12)


@pytest.mark.parametrize("df", [1, 2, 5, 19, 100])
def test_chisq_cdf_matches_scipy(df):
    d = ChiSquared(df)
    for x in np.linspace(0.01, 4 * df, 40):
        assert d.cdf(x) == pytest.approx(sps.chi2.cdf(x, df), abs=1e-10)


@pytest.mark.parametrize("a,b", [(0.5, 0.5), (2, 3), (18, 3), (1, 1), (7.5, 0.2)])
def test_beta_cdf_matches_scipy(a, b):
    d = Beta(a, b)
    for x in np.linspace(0.001, 0.999, 30):
        assert d.cdf(x) == pytest.approx(sps.beta.cdf(x, a, b), abs=1e-10)


@pytest.mark.parametrize("n,p", [(5, 0.5), (20, 0.3), (50, 0.9), (1, 0.01)])
def test_binomial_cdf_matches_scipy(n, p):
    d = Binomial(n, p)
    for k in range(n + 1):
        assert d.cdf(k) == pytest.approx(sps.binom.cdf(k, n, p), abs=1e-12)
    assert d.cdf(-1) == 0.0
    assert d.cdf(n) == 1.0


def test_chisq_19_golden_values():
    # chi-square with 19 degrees of freedom at the worked variance example
    d = ChiSquared(19)
    assert 1.0 - d.cdf(15.01) == pytest.approx(0.7219615372406769, abs=1e-12)  # [DERIVED]
    assert round(1.0 - d.cdf(15.01), 2) == 0.72  # [PAPER]
    assert d.quantile(0.90) == pytest.approx(27.203571029356727, abs=1e-9)  # [DERIVED]


# ---- quantile round-trips -------------------------------------------------

@settings(max_examples=200)
@given(unit)
def test_normal_quantile_roundtrip(u):
    d = Normal(1.0, 2.0)
    assert d.cdf(d.quantile(u)) == pytest.approx(u, abs=1e-12)


@settings(max_examples=100)
@given(unit, st.integers(min_value=1, max_value=60))
def test_chisq_quantile_roundtrip(u, df):
    d = ChiSquared(df)
    assert d.cdf(d.quantile(u)) == pytest.approx(u, abs=1e-11)


@settings(max_examples=100)
@given(unit, st.floats(0.2, 30), st.floats(0.2, 30))
def test_beta_quantile_roundtrip(u, a, b):
    d = Beta(a, b)
    assert d.cdf(d.quantile(u)) == pytest.approx(u, abs=1e-10)


def test_binomial_quantile_is_cdf_inverse():
    d = Binomial(20, 0.3)
    for u in [0.001, 0.25, 0.5, 0.75, 0.999]:
        k = d.quantile(u)
        assert d.cdf(k) >= u
        assert k == 0 or d.cdf(k - 1) < u


def test_quantile_endpoints():
    assert Normal(0, 1).quantile(0.0) == -math.inf
    assert ChiSquared(3).quantile(0.0) == 0.0
    assert Beta(2, 2).quantile(1.0) == 1.0
    assert Uniform01().quantile(0.3) == 0.3


# ---- beta-binomial identity -----------------------------------------------

def test_beta_binomial_tail_identity():
    # P(Bin(n, theta) <= x - 1) equals the upper beta tail used by the focal
    # interval construction
    for n in (2, 5, 11, 20):
        for x in range(1, n + 1):
            for theta in np.linspace(0.02, 0.98, 13):
                lhs = Binomial(n, theta).cdf(x - 1)
                rhs = Beta(n - x + 1, x).cdf(1.0 - theta)
                assert lhs == pytest.approx(rhs, abs=1e-9)


# ---- parameter validation ---------------------------------------------------

def test_domain_errors():
    with pytest.raises(ParameterDomainError):
        Normal(0.0, 0.0)
    with pytest.raises(ParameterDomainError):
        Binomial(0, 0.5)
    with pytest.raises(ParameterDomainError):
        Binomial(5, 1.0)
    with pytest.raises(ParameterDomainError):
        Beta(-1.0, 2.0)
    with pytest.raises(ParameterDomainError):
        ChiSquared(0)
    with pytest.raises(ParameterDomainError):
        Normal(0, 1).quantile(1.5)


# ---- samplers ----------------------------------------------------------------

def test_rng_streams_are_bit_exact():
    a = make_rng(42, 7).random(16)
    b = make_rng(42, 7).random(16)
    c = make_rng(42, 8).random(16)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)


def test_normal_sampler_ks():
    d = Normal(1.0, 2.0)
    xs = d.sample(make_rng(0), 20000)
    stat = sps.kstest(xs, "norm", args=(1.0, 2.0)).statistic
    assert stat < 1.5 * 1.36 / math.sqrt(20000)


def test_chisq_sampler_ks():
    d = ChiSquared(19)
    xs = d.sample(make_rng(1), 20000)
    stat = sps.kstest(xs, "chi2", args=(19,)).statistic
    assert stat < 1.5 * 1.36 / math.sqrt(20000)


def test_beta_sampler_ks():
    d = Beta(2.0, 5.0)
    xs = d.sample(make_rng(2), 20000)
    stat = sps.kstest(xs, "beta", args=(2.0, 5.0)).statistic
    assert stat < 1.5 * 1.36 / math.sqrt(20000)


def test_binomial_sampler_moments():
    d = Binomial(20, 0.3)
    xs = d.sample(make_rng(3), 40000)
    assert xs.mean() == pytest.approx(6.0, abs=0.05)
    assert xs.var() == pytest.approx(20 * 0.3 * 0.7, rel=0.05)
