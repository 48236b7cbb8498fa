"""Built-in association models: binomial one-sided, normal mean with known
variance (optionally box-constrained), and the normal variance marginal
association T = sigma^2 * F^{-1}(U) with F = ChiSq(n-1).
"""

from __future__ import annotations

import math
from typing import Optional

import numpy as np

from .core import AssociationModel, UnsupportedModelError
from .distributions import (
    Beta,
    Binomial,
    ChiSquared,
    Normal,
    ParameterDomainError,
    Uniform01,
)
from .intervals import Interval, IntervalSet
from .special import norm_cdf

_STD_NORMAL = Normal(0.0, 1.0)


def _map_monotone_parts(pset: IntervalSet, h_inv) -> IntervalSet:
    """Pull an IntervalSet back through a strictly decreasing map via h_inv."""
    parts = []
    for iv in pset.parts:
        lo_u = h_inv(iv.hi)
        hi_u = h_inv(iv.lo)
        lo_u, hi_u = max(0.0, min(1.0, lo_u)), max(0.0, min(1.0, hi_u))
        lc = iv.hi_closed or math.isinf(iv.hi)
        hc = iv.lo_closed or math.isinf(iv.lo)
        if lo_u < hi_u or (lo_u == hi_u and lc and hc):
            parts.append(Interval(lo_u, hi_u, lc, hc))
    return IntervalSet(parts)


class _SingletonFocalModel(AssociationModel):
    """Association whose focal set is the singleton {h_x(u)}, with h strictly
    decreasing in u, optionally intersected with a box constraint."""

    box: Optional[tuple[float, float]] = None

    def h(self, x: float, u: float) -> float:
        raise NotImplementedError

    def h_inv(self, x: float, theta: float) -> float:
        raise NotImplementedError

    def focal(self, x, u):
        theta = self.h(x, u)
        point = IntervalSet.point(theta) if math.isfinite(theta) else IntervalSet.empty()
        return point.intersect(self.param_space)

    def u_subset_event(self, x, pset):
        inside = _map_monotone_parts(pset.intersect(self.param_space), lambda th: self.h_inv(x, th))
        if self.box is None:
            return inside
        # where the constraint empties the focal set, it is trivially a subset
        return inside.union(self.empty_focal_event(x))

    def empty_focal_event(self, x):
        if self.box is None:
            return IntervalSet.empty()
        lo, hi = self.box
        nonempty = IntervalSet.closed(self.h_inv(x, hi), self.h_inv(x, lo))
        return nonempty.complement(IntervalSet.closed(0.0, 1.0))


class NormalMeanModel(_SingletonFocalModel):
    """X-bar = theta + sigma * n^{-1/2} * Phi^{-1}(U) with U ~ Unif(0,1)."""

    def __init__(self, n: int, sigma: float, box: Optional[tuple[float, float]] = None):
        if n < 1:
            raise ParameterDomainError(f"n must be >= 1, got {n}")
        if not sigma > 0:
            raise ParameterDomainError(f"sigma must be > 0, got {sigma}")
        self.n = int(n)
        self.sigma = float(sigma)
        self.scale = self.sigma / math.sqrt(self.n)
        self.box = box
        if box is None:
            self.param_space = IntervalSet.real_line()
            self.label = "normal-mean"
        else:
            self.param_space = IntervalSet.closed(box[0], box[1])
            self.label = "normal-mean-constrained"
        self.aux_law = Uniform01()

    def h(self, x, u):
        return x - self.scale * _STD_NORMAL.quantile(u)

    def h_inv(self, x, theta):
        if math.isinf(theta):
            return 0.0 if theta > 0 else 1.0
        return norm_cdf((x - theta) / self.scale)

    def generate(self, theta, u):
        return theta + self.scale * _STD_NORMAL.quantile(u)

    def simulate(self, theta, rng, size):
        return theta + self.scale * rng.standard_normal(size)

    # hooks for the p-value engine (canonical statistic T(X) = X-bar)
    def stat_value(self, x):
        return x

    def stat_on_aux(self, theta, u):
        return self.generate(theta, u)

    def tail_prob(self, theta, t, tail="strict"):
        return 1.0 - norm_cdf((t - theta) / self.scale)

    def sup_boundary(self, null_set: IntervalSet) -> float:
        # T(a(theta, u)) increases in theta: sup over the null at its upper end
        return null_set.supremum()

    def matched_prs_size(self, theta_star, t, tail="strict"):
        return norm_cdf((t - theta_star) / self.scale)

    def matched_prs_index_range(self, theta_star):
        return theta_star - 14.0 * self.scale, theta_star + 14.0 * self.scale


class NormalVarianceModel(AssociationModel):
    """Marginal association for sigma^2: T = sigma^2 * F^{-1}(U) with
    F = ChiSq(n-1), where the observation is the summary t = (n-1) * S^2."""

    def __init__(self, n: int):
        if n < 2:
            raise ParameterDomainError(f"n must be >= 2, got {n}")
        self.n = int(n)
        self.chisq = ChiSquared(n - 1)
        self.param_space = IntervalSet.interval(0.0, math.inf, False, False)
        self.aux_law = Uniform01()
        self.label = "normal-variance"
        self.box = None

    def h(self, x, u):
        q = self.chisq.quantile(u)
        return x / q if q > 0 else math.inf

    def h_inv(self, x, theta):
        if theta <= 0:
            return 1.0
        if math.isinf(theta):
            return 0.0
        return self.chisq.cdf(x / theta)

    def focal(self, x, u):
        theta = self.h(x, u)
        if not math.isfinite(theta):
            return IntervalSet.empty()
        return IntervalSet.point(theta)

    def u_subset_event(self, x, pset):
        return _map_monotone_parts(
            pset.intersect(self.param_space), lambda th: self.h_inv(x, th)
        )

    def empty_focal_event(self, x):
        return IntervalSet.empty()

    def generate(self, theta, u):
        return theta * self.chisq.quantile(u)

    def simulate(self, theta, rng, size):
        return theta * rng.chisquare(self.n - 1, size)

    def stat_value(self, x):
        return x

    def stat_on_aux(self, theta, u):
        return self.generate(theta, u)

    def tail_prob(self, theta, t, tail="strict"):
        return 1.0 - self.chisq.cdf(t / theta)

    def sup_boundary(self, null_set: IntervalSet) -> float:
        return null_set.supremum()

    def matched_prs_size(self, theta_star, t, tail="strict"):
        return self.chisq.cdf(t / theta_star) if t > 0 else 0.0

    def matched_prs_index_range(self, theta_star):
        hi = theta_star * self.chisq.quantile(1.0 - 1e-14)
        return 0.0, hi


class BinomialModel(AssociationModel):
    """X ~ Bin(n, theta) with the natural association
    F_theta(X - 1) <= U < F_theta(X), U ~ Unif(0, 1)."""

    def __init__(self, n: int):
        if n < 1:
            raise ParameterDomainError(f"n must be >= 1, got {n}")
        self.n = int(n)
        self.param_space = IntervalSet.interval(0.0, 1.0, False, False)
        self.aux_law = Uniform01()
        self.label = "binomial"
        self.box = None
        self.is_discrete = True

    def _cdf(self, theta: float, k: int) -> float:
        if k < 0:
            return 0.0
        if k >= self.n:
            return 1.0
        return Binomial(self.n, theta).cdf(k)

    def generate(self, theta, u):
        acc = 0.0
        b = Binomial(self.n, theta)
        for k in range(self.n + 1):
            acc += math.exp(b.log_pdf(k))
            if u < acc:
                return float(k)
        return float(self.n)

    def simulate(self, theta, rng, size):
        return rng.binomial(self.n, theta, size).astype(float)

    def focal(self, x, u):
        x = int(round(x))
        if not 0 <= x <= self.n:
            raise ParameterDomainError(f"x must be in 0..{self.n}, got {x}")
        if x == 0:
            lo, lc = 0.0, False
        else:
            lo, lc = 1.0 - Beta(self.n - x + 1, x).quantile(u), True
        if x == self.n:
            hi = 1.0
        else:
            hi = 1.0 - Beta(self.n - x, x + 1).quantile(u)
        return IntervalSet.interval(lo, hi, lc, False)

    def u_subset_event(self, x, pset):
        x = int(round(x))
        parts = []
        for iv in pset.intersect(self.param_space).parts:
            # focal is [l(u), r(u)) with both endpoints decreasing in u
            if x == 0:
                lo_ok_cap = 1.0 if iv.lo <= 0.0 else None
            elif iv.lo <= 0.0:
                lo_ok_cap = 1.0
            else:
                lo_ok_cap = self._cdf(iv.lo, x - 1)
            if lo_ok_cap is None:
                continue
            if x == self.n:
                if iv.hi >= 1.0:
                    hi_floor = 0.0
                else:
                    continue
            elif iv.hi >= 1.0:
                hi_floor = 0.0
            else:
                hi_floor = self._cdf(iv.hi, x)
            lo_u, hi_u = hi_floor, lo_ok_cap
            hc = iv.lo_closed or iv.lo <= 0.0
            if lo_u < hi_u or (lo_u == hi_u and hc):
                parts.append(Interval(lo_u, hi_u, True, hc))
        return IntervalSet(parts)

    def empty_focal_event(self, x):
        return IntervalSet.empty()

    def stat_value(self, x):
        return float(x)

    def stat_on_aux(self, theta, u):
        return self.generate(theta, u)

    def tail_prob(self, theta, t, tail="strict"):
        k = int(math.floor(t + 1e-12))
        if tail == "strict":
            return 1.0 - self._cdf(theta, k)
        return 1.0 - self._cdf(theta, k - 1)

    def sup_boundary(self, null_set: IntervalSet) -> float:
        return null_set.supremum()

    def matched_prs_size(self, theta_star, t, tail="strict"):
        if tail == "strict":
            k = int(math.floor(t + 1e-12))
        else:
            k = int(math.ceil(t - 1e-12)) - 1
        return self._cdf(theta_star, k)

    def matched_prs_index_range(self, theta_star):
        return -1.0, float(self.n)

    def matched_prs_attainable(self, theta_star):
        return [self._cdf(theta_star, k) for k in range(-1, self.n + 1)]


def sample_summary(values) -> tuple[int, float, float]:
    """(n, mean, S^2) with the n-1 divisor, for feeding the normal models."""
    arr = np.asarray(list(values), dtype=float)
    n = arr.size
    if n < 2:
        raise ValueError("need at least two observations to form S^2")
    mean = float(arr.mean())
    s2 = float(arr.var(ddof=1))
    return n, mean, s2


REGISTRY = {
    "binomial": lambda n, **kw: BinomialModel(n),
    "normal-mean": lambda n, sigma=1.0, **kw: NormalMeanModel(n, sigma),
    "normal-variance": lambda n, **kw: NormalVarianceModel(n),
    "normal-mean-constrained": lambda n, sigma=1.0, lo=-1.0, hi=1.0, **kw: NormalMeanModel(
        n, sigma, box=(lo, hi)
    ),
}


def make_model(name: str, **params) -> AssociationModel:
    if name not in REGISTRY:
        raise UnsupportedModelError(
            f"unknown model {name!r}; available: {sorted(REGISTRY)}"
        )
    return REGISTRY[name](**params)
