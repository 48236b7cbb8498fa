"""Probability distribution kernel: cdf, quantile, sampler, log density.

Only the five laws the built-in models need.  Continuous quantiles are
computed by bracketing bisection on the implemented cdf, so
cdf(quantile(u)) == u holds by construction.  Sampling uses a Philox
counter-based generator: the stream is bit-exact given (seed, stream).
"""

from __future__ import annotations

import math
from typing import Optional

import numpy as np

from .special import beta_inc, gamma_p, norm_cdf


class ParameterDomainError(ValueError):
    """A distribution parameter is outside its legal domain."""


def make_rng(seed: int, stream: int = 0) -> np.random.Generator:
    """Counter-based Philox generator; (seed, stream) fully determines the stream."""
    return np.random.Generator(np.random.Philox(key=(seed << 64) + stream))


def _bisect_quantile(cdf, u: float, lo: float, hi: float) -> float:
    # invariants: cdf(lo) < u <= cdf(hi) once bracketed
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            break
        if cdf(mid) >= u:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


class Distribution:
    """Base class; subclasses implement cdf / log_pdf / sample and set support."""

    support: tuple[float, float] = (-math.inf, math.inf)
    is_discrete: bool = False

    def cdf(self, x: float) -> float:
        raise NotImplementedError

    def log_pdf(self, x: float) -> float:
        raise NotImplementedError

    def quantile(self, u: float) -> float:
        if not 0.0 <= u <= 1.0:
            raise ParameterDomainError(f"quantile argument {u} outside [0, 1]")
        lo, hi = self.support
        if u == 0.0:
            return lo
        if u == 1.0:
            return hi
        lo, hi = self._bracket(u)
        return _bisect_quantile(self.cdf, u, lo, hi)

    def _bracket(self, u: float) -> tuple[float, float]:
        lo, hi = self.support
        if math.isinf(lo):
            lo = -1.0
            while self.cdf(lo) >= u:
                lo *= 2.0
        if math.isinf(hi):
            hi = 1.0
            while self.cdf(hi) < u:
                hi *= 2.0
        return lo, hi

    def sample(self, rng: np.random.Generator, size: Optional[int] = None):
        raise NotImplementedError


class Uniform01(Distribution):
    support = (0.0, 1.0)

    def cdf(self, x):
        return min(1.0, max(0.0, x))

    def quantile(self, u):
        if not 0.0 <= u <= 1.0:
            raise ParameterDomainError(f"quantile argument {u} outside [0, 1]")
        return u

    def log_pdf(self, x):
        return 0.0 if 0.0 <= x <= 1.0 else -math.inf

    def sample(self, rng, size=None):
        return rng.random() if size is None else rng.random(size)

    def __repr__(self):
        return "Uniform01()"


class Normal(Distribution):
    def __init__(self, mean: float, sd: float):
        if not sd > 0:
            raise ParameterDomainError(f"Normal sd must be > 0, got {sd}")
        self.mean = float(mean)
        self.sd = float(sd)

    def cdf(self, x):
        if math.isinf(x):
            return 0.0 if x < 0 else 1.0
        return norm_cdf((x - self.mean) / self.sd)

    def log_pdf(self, x):
        z = (x - self.mean) / self.sd
        return -0.5 * z * z - math.log(self.sd) - 0.5 * math.log(2.0 * math.pi)

    def sample(self, rng, size=None):
        return self.mean + self.sd * rng.standard_normal(size)

    def __repr__(self):
        return f"Normal({self.mean:g}, {self.sd:g})"


class Binomial(Distribution):
    is_discrete = True

    def __init__(self, n: int, p: float):
        if not (isinstance(n, (int, np.integer)) and n >= 1):
            raise ParameterDomainError(f"Binomial n must be a positive integer, got {n}")
        if not 0.0 < p < 1.0:
            raise ParameterDomainError(f"Binomial p must be in (0, 1), got {p}")
        self.n = int(n)
        self.p = float(p)
        self.support = (0.0, float(n))

    def log_pdf(self, k):
        k = int(k)
        if k < 0 or k > self.n:
            return -math.inf
        return (
            math.lgamma(self.n + 1)
            - math.lgamma(k + 1)
            - math.lgamma(self.n - k + 1)
            + k * math.log(self.p)
            + (self.n - k) * math.log1p(-self.p)
        )

    def cdf(self, x):
        if x < 0:
            return 0.0
        k = min(self.n, math.floor(x))
        if k >= self.n:
            return 1.0
        # exact summation of pmf terms
        return min(1.0, math.fsum(math.exp(self.log_pdf(j)) for j in range(k + 1)))

    def quantile(self, u):
        if not 0.0 <= u <= 1.0:
            raise ParameterDomainError(f"quantile argument {u} outside [0, 1]")
        acc = 0.0
        for k in range(self.n + 1):
            acc += math.exp(self.log_pdf(k))
            if acc >= u:
                return float(k)
        return float(self.n)

    def sample(self, rng, size=None):
        out = rng.binomial(self.n, self.p, size)
        return float(out) if size is None else out.astype(float)

    def __repr__(self):
        return f"Binomial({self.n}, {self.p:g})"


class Beta(Distribution):
    support = (0.0, 1.0)

    def __init__(self, a: float, b: float):
        if not (a > 0 and b > 0):
            raise ParameterDomainError(f"Beta parameters must be > 0, got ({a}, {b})")
        self.a = float(a)
        self.b = float(b)

    def cdf(self, x):
        return beta_inc(self.a, self.b, min(1.0, max(0.0, x)))

    def log_pdf(self, x):
        if not 0.0 < x < 1.0:
            return -math.inf
        return (
            (self.a - 1.0) * math.log(x)
            + (self.b - 1.0) * math.log1p(-x)
            + math.lgamma(self.a + self.b)
            - math.lgamma(self.a)
            - math.lgamma(self.b)
        )

    def sample(self, rng, size=None):
        return rng.beta(self.a, self.b, size)

    def __repr__(self):
        return f"Beta({self.a:g}, {self.b:g})"


class ChiSquared(Distribution):
    support = (0.0, math.inf)

    def __init__(self, df: int):
        if not (isinstance(df, (int, np.integer)) and df >= 1):
            raise ParameterDomainError(f"ChiSquared df must be a positive integer, got {df}")
        self.df = int(df)

    def cdf(self, x):
        if x <= 0:
            return 0.0
        if math.isinf(x):
            return 1.0
        return gamma_p(self.df / 2.0, x / 2.0)

    def log_pdf(self, x):
        if x <= 0:
            return -math.inf
        h = self.df / 2.0
        return (h - 1.0) * math.log(x) - x / 2.0 - h * math.log(2.0) - math.lgamma(h)

    def sample(self, rng, size=None):
        return rng.chisquare(self.df, size)

    def _bracket(self, u):
        hi = 2.0 * self.df + 10.0
        while self.cdf(hi) < u:
            hi *= 2.0
        return 0.0, hi

    def __repr__(self):
        return f"ChiSquared({self.df})"
