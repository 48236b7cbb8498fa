"""Monte Carlo audits: validity (stochastic dominance of the plausibility),
uniformity under a true point null, plausibility-region coverage, and the
nested-null p-value reversal demonstration.

Every audit derives its random stream from (seed, replication block), so
reports are bit-reproducible given (seed, n_reps)."""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from typing import Optional, Sequence

import numpy as np

from .core import (
    Assertion,
    AssociationModel,
    NestedRandomSet,
    plausibility_value,
    symmetric_prs,
)
from .distributions import make_rng
from .special import norm_cdf


def ks_distance(samples: np.ndarray) -> float:
    """One-sample Kolmogorov-Smirnov distance from Unif(0,1)."""
    u = np.sort(np.asarray(samples, dtype=float))
    n = u.size
    grid = np.arange(1, n + 1) / n
    return float(max(np.max(grid - u), np.max(u - (grid - 1.0 / n))))


def distorted_prs(base: NestedRandomSet, exponent: float = 0.5) -> NestedRandomSet:
    """Negative control: same supports, but the claimed measure is
    size**exponent instead of the natural measure.  Exponents below 1
    overstate containment probabilities and break validity; they also
    fail check_admissible's P2 comparison."""
    return NestedRandomSet(
        index_lo=base.index_lo,
        index_hi=base.index_hi,
        support=base.support,
        measure_of=lambda t: min(1.0, max(0.0, base.measure_of(t) ** exponent)),
        shape=base.shape,
        measure_from_size=lambda c: min(1.0, max(0.0, base.measure_from_size(c) ** exponent)),
        attainable_sizes=base.attainable_sizes,
        label=f"{base.label} (distorted ^{exponent:g})",
    )


def _simulate(model: AssociationModel, theta: float, n_reps: int, seed: int,
              stream: int = 0) -> np.ndarray:
    rng = make_rng(seed, stream)
    return np.asarray(model.simulate(theta, rng, n_reps), dtype=float)


def _pl_samples(model, s, a: Assertion, xs: np.ndarray) -> np.ndarray:
    event = a.complement().set
    cache: dict[float, float] = {}
    out = np.empty(xs.size)
    discrete = getattr(model, "is_discrete", False)
    from .core import containment_prob  # local import to keep module load light

    for i, x in enumerate(xs):
        key = float(x)
        if discrete and key in cache:
            out[i] = cache[key]
            continue
        val = 1.0 - containment_prob(s, model.u_subset_event(key, event))
        if discrete:
            cache[key] = val
        out[i] = val
    return out


@dataclass
class ValidityAudit:
    model: str
    assertion: str
    theta_true: float
    n_reps: int
    seed: int
    alpha_grid: list
    exceedance: list
    max_violation: float
    tolerance: float
    passed: bool
    notes: list = field(default_factory=list)

    def to_json(self, **kw) -> str:
        return json.dumps(asdict(self), **kw)


def audit_validity(
    model: AssociationModel,
    s: NestedRandomSet,
    a: Assertion,
    theta: float,
    n_reps: int,
    seed: int,
    alpha_grid: Optional[Sequence[float]] = None,
) -> ValidityAudit:
    """Empirical check of sup_{theta in A} P{pl_X(A) <= alpha} <= alpha."""
    if not a.contains(theta):
        raise ValueError(f"theta={theta} does not satisfy the audited assertion")
    if alpha_grid is None:
        alpha_grid = [0.01, 0.025, 0.05, 0.1, 0.2, 0.5]
    alpha_grid = sorted(alpha_grid)
    xs = _simulate(model, theta, n_reps, seed)
    pls = _pl_samples(model, s, a, xs)
    exceedance = [float((pls <= alpha).mean()) for alpha in alpha_grid]
    violations = [
        exc - alpha - 3.0 * math.sqrt(alpha * (1.0 - alpha) / n_reps)
        for exc, alpha in zip(exceedance, alpha_grid)
    ]
    max_violation = max(exc - alpha for exc, alpha in zip(exceedance, alpha_grid))
    passed = max(violations) <= 0.005
    return ValidityAudit(
        model=model.label,
        assertion=repr(a.set),
        theta_true=theta,
        n_reps=n_reps,
        seed=seed,
        alpha_grid=list(alpha_grid),
        exceedance=exceedance,
        max_violation=max_violation,
        tolerance=0.005,
        passed=passed,
        notes=[f"predictive random set: {s.label}"],
    )


@dataclass
class UniformityReport:
    model: str
    theta0: float
    n_reps: int
    seed: int
    ks_distance: float
    threshold: float
    mode: str
    passed: bool
    notes: list = field(default_factory=list)

    def to_json(self, **kw) -> str:
        return json.dumps(asdict(self), **kw)


def audit_uniformity(
    model: AssociationModel,
    s: NestedRandomSet,
    theta0: float,
    n_reps: int,
    seed: int,
) -> UniformityReport:
    """KS distance of pl_X({theta0}) from Unif(0,1) under X ~ P_{X|theta0}.
    Discrete models switch to a stochastic-dominance-only check (atoms
    preclude exact uniformity)."""
    a = Assertion.point(theta0, model.param_space)
    xs = _simulate(model, theta0, n_reps, seed)
    pls = _pl_samples(model, s, a, xs)
    if getattr(model, "is_discrete", False):
        alphas = np.linspace(0.05, 0.95, 19)
        worst = max(
            float((pls <= alpha).mean()) - alpha
            - 3.0 * math.sqrt(alpha * (1 - alpha) / n_reps)
            for alpha in alphas
        )
        return UniformityReport(
            model=model.label,
            theta0=theta0,
            n_reps=n_reps,
            seed=seed,
            ks_distance=float("nan"),
            threshold=0.005,
            mode="dominance-only",
            passed=worst <= 0.005,
            notes=["discrete model: checking P(pl <= alpha) <= alpha only"],
        )
    d = ks_distance(pls)
    threshold = 1.5 * 1.36 / math.sqrt(n_reps)
    return UniformityReport(
        model=model.label,
        theta0=theta0,
        n_reps=n_reps,
        seed=seed,
        ks_distance=d,
        threshold=threshold,
        mode="kolmogorov-smirnov",
        passed=d < threshold,
    )


@dataclass
class CoverageReport:
    model: str
    alpha: float
    theta_true: float
    n_reps: int
    seed: int
    coverage: float
    lower_bound: float
    passed: bool

    def to_json(self, **kw) -> str:
        return json.dumps(asdict(self), **kw)


def audit_region_coverage(
    model: AssociationModel,
    s: NestedRandomSet,
    alpha: float,
    theta: float,
    n_reps: int,
    seed: int,
) -> CoverageReport:
    """Fraction of replications whose plausibility region covers theta.
    Membership in the region is pl_X({theta}) > alpha."""
    a = Assertion.point(theta, model.param_space)
    xs = _simulate(model, theta, n_reps, seed)
    pls = _pl_samples(model, s, a, xs)
    coverage = float((pls > alpha).mean())
    bound = 1.0 - alpha - 3.0 * math.sqrt(alpha * (1.0 - alpha) / n_reps)
    return CoverageReport(
        model=model.label,
        alpha=alpha,
        theta_true=theta,
        n_reps=n_reps,
        seed=seed,
        coverage=coverage,
        lower_bound=bound,
        passed=coverage >= bound,
    )


# ---------------------------------------------------------------------------
# Nested-null p-value reversals (lack of coherence)
# ---------------------------------------------------------------------------

def _distance_to_set(x: float, parts) -> float:
    best = math.inf
    for iv in parts:
        if iv.lo <= x <= iv.hi:
            return 0.0
        best = min(best, abs(x - iv.lo), abs(x - iv.hi))
    return best


def _two_sided_pvalue(scale: float, null_set, x: float) -> float:
    """sup over the null of P{d(X, null) >= d(x, null)} for X ~ N(theta, scale)."""
    c = _distance_to_set(x, null_set.parts)
    if c <= 0.0:
        return 1.0

    def tail(theta: float) -> float:
        total = 0.0
        # distance >= c means X falls outside the open c-neighborhood of the null
        neighborhood = [(iv.lo - c, iv.hi + c) for iv in null_set.parts]
        # merge the (sorted, possibly overlapping) enlarged pieces
        merged = []
        for lo, hi in sorted(neighborhood):
            if merged and lo <= merged[-1][1]:
                merged[-1] = (merged[-1][0], max(merged[-1][1], hi))
            else:
                merged.append((lo, hi))
        total = norm_cdf((merged[0][0] - theta) / scale)
        for (lo1, hi1), (lo2, hi2) in zip(merged, merged[1:]):
            total += norm_cdf((lo2 - theta) / scale) - norm_cdf((hi1 - theta) / scale)
        total += 1.0 - norm_cdf((merged[-1][1] - theta) / scale)
        return total

    candidates = []
    for iv in null_set.parts:
        candidates.extend([iv.lo, iv.hi])
        candidates.extend(np.linspace(iv.lo, iv.hi, 101))
    return max(tail(float(th)) for th in candidates)


@dataclass
class CoherenceReport:
    x_grid: list
    null_labels: list
    pvalues: list          # rows per x, columns per null
    plausibilities: list   # same layout, single fixed predictive random set
    reversals: list        # (x, inner_null_index, outer_null_index)
    plausibility_monotone: bool

    def to_json(self, **kw) -> str:
        return json.dumps(asdict(self), **kw)


def coherence_demo(
    model,
    nested_nulls: Sequence[Assertion],
    x_grid: Sequence[float],
    prs: Optional[NestedRandomSet] = None,
) -> CoherenceReport:
    """For each x: the p-value of each nested null with its own two-sided
    distance statistic, next to single-IM plausibilities under one fixed
    symmetric predictive random set.  Records every adjacent pair where the
    smaller null gets the larger p-value; the plausibility column must be
    monotone everywhere."""
    for inner, outer in zip(nested_nulls, nested_nulls[1:]):
        if not inner.set.is_subset_of(outer.set):
            raise ValueError("nulls must be increasing by inclusion")
    prs = prs or symmetric_prs()
    scale = model.scale
    pvals, pls, reversals = [], [], []
    monotone = True
    tol = 1e-12
    for x in x_grid:
        row_p = [_two_sided_pvalue(scale, a.set, float(x)) for a in nested_nulls]
        row_pl = [plausibility_value(model, float(x), prs, a) for a in nested_nulls]
        for i in range(len(nested_nulls) - 1):
            if row_p[i] > row_p[i + 1] + tol:
                reversals.append((float(x), i, i + 1))
            if row_pl[i] > row_pl[i + 1] + tol:
                monotone = False
        pvals.append(row_p)
        pls.append(row_pl)
    return CoherenceReport(
        x_grid=[float(x) for x in x_grid],
        null_labels=[repr(a.set) for a in nested_nulls],
        pvalues=pvals,
        plausibilities=pls,
        reversals=reversals,
        plausibility_monotone=monotone,
    )
