"""Classical p-values and the predictive random set that reproduces them.

The synthesizer manufactures the nested family
    S_t = cl{u : sup_{theta in null} T(a(theta, u)) < t}
with the natural measure inf_{theta in null} P{T(X) < t}, so that the
plausibility of the null under this random set equals the p-value.

Discrete tie handling: the definition uses "T(X) >= T(x)" (tail="weak"),
while one-sided discrete closed forms conventionally report P{T(X) > T(x)}
(tail="strict").  Both conventions are supported end to end; they differ
by the point mass at the observed value and coincide for continuous
statistics.  The default is "strict".
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .core import (
    Assertion,
    AssociationModel,
    NestedRandomSet,
    PlausibilityReport,
    check_admissible,
    containment_prob,
)
from .distributions import make_rng
from .intervals import IntervalSet


class ConfigurationError(ValueError):
    """Monte Carlo requested without the inputs that make it reproducible."""


@dataclass
class TestStatistic:
    """T: X -> R with the convention that large values count against the null."""

    evaluate: Callable[[float], float]
    on_aux: Callable[[float, float], float]
    label: str = "T"


def canonical_stat(m: AssociationModel) -> TestStatistic:
    if not hasattr(m, "stat_value"):
        raise ValueError(f"{m.label} does not register a canonical statistic")
    return TestStatistic(evaluate=m.stat_value, on_aux=m.stat_on_aux, label=f"T[{m.label}]")


@dataclass
class SupConfig:
    """Search and sampling configuration; serializable for run manifests."""

    grid_initial: int = 64
    refine_rounds: int = 2
    refine_factor: int = 8
    mc_samples: int = 100_000
    seed: Optional[int] = None
    tail: str = "strict"

    def __post_init__(self):
        if self.tail not in ("strict", "weak"):
            raise ConfigurationError(f"tail must be 'strict' or 'weak', got {self.tail!r}")

    def to_dict(self) -> dict:
        return asdict(self)


# ---------------------------------------------------------------------------
# p-value
# ---------------------------------------------------------------------------

def _null_theta_grid(null_set: IntervalSet, param_space: IntervalSet, size: int):
    sets = null_set.intersect(param_space)
    points = []
    for iv in sets.parts:
        lo = iv.lo if math.isfinite(iv.lo) else iv.hi - 50.0
        hi = iv.hi if math.isfinite(iv.hi) else iv.lo + 50.0
        if not math.isfinite(lo):
            lo, hi = -50.0, 50.0
        eps = 1e-9 * max(1.0, abs(lo), abs(hi))
        lo2 = lo + (0.0 if iv.lo_closed else eps)
        hi2 = hi - (0.0 if iv.hi_closed else eps)
        if hi2 < lo2:
            lo2 = hi2 = 0.5 * (lo + hi)
        points.extend(np.linspace(lo2, hi2, max(2, size // len(sets.parts))))
    return np.array(points)


def _mc_tail_prob(m, stat, theta, t_obs, cfg: SupConfig, stream: int):
    if cfg.seed is None:
        raise ConfigurationError("Monte Carlo tail probability requires an explicit seed")
    rng = make_rng(cfg.seed, stream)
    xs = m.simulate(theta, rng, cfg.mc_samples)
    ts = np.array([stat.evaluate(float(x)) for x in xs])
    if cfg.tail == "strict":
        hits = ts > t_obs
    else:
        hits = ts >= t_obs
    p = float(hits.mean())
    se = math.sqrt(max(p * (1.0 - p), 1e-12) / cfg.mc_samples)
    return p, se


def pvalue(
    m: AssociationModel,
    stat: TestStatistic,
    null: Assertion,
    x: float,
    cfg: Optional[SupConfig] = None,
) -> PlausibilityReport:
    """sup over the null of P{T(X) at least as extreme as T(x)}."""
    cfg = cfg or SupConfig()
    if null.is_empty:
        raise ValueError("null assertion is empty")
    t_obs = stat.evaluate(x)
    diagnostics = []

    is_point = all(iv.lo == iv.hi for iv in null.set.parts)
    has_closed_tail = hasattr(m, "tail_prob")

    if is_point:
        thetas = np.array([iv.lo for iv in null.set.parts])
        diagnostics.append("point null: sup bypassed")
    elif has_closed_tail and hasattr(m, "sup_boundary"):
        theta_star = m.sup_boundary(null.set)
        if not math.isfinite(theta_star) or not null.contains(theta_star):
            thetas = _null_theta_grid(null.set, m.param_space, cfg.grid_initial)
        else:
            thetas = np.array([theta_star])
            diagnostics.append("sup attained at the registered null boundary")
    else:
        thetas = _null_theta_grid(null.set, m.param_space, cfg.grid_initial)

    def tail_at(theta, stream):
        if has_closed_tail:
            return m.tail_prob(float(theta), t_obs, cfg.tail), 0.0
        return _mc_tail_prob(m, stat, float(theta), t_obs, cfg, stream)

    best, best_se, best_theta = -1.0, 0.0, None
    for i, th in enumerate(thetas):
        p, se = tail_at(th, i)
        if p > best:
            best, best_se, best_theta = p, se, float(th)

    if len(thetas) > 1:
        # refine around the running maximizer
        span = (thetas.max() - thetas.min()) / max(1, len(thetas) - 1)
        for round_i in range(cfg.refine_rounds):
            span /= cfg.refine_factor
            local = np.linspace(best_theta - span * cfg.refine_factor,
                                best_theta + span * cfg.refine_factor,
                                cfg.refine_factor * 2 + 1)
            for j, th in enumerate(local):
                if not null.contains(float(th)):
                    continue
                p, se = tail_at(th, 1000 * (round_i + 1) + j)
                if p > best:
                    best, best_se, best_theta = p, se, float(th)

    method = "closed-form" if has_closed_tail else "monte-carlo"
    return PlausibilityReport(
        plausibility=min(1.0, max(0.0, best)),
        belief=0.0,
        method=method,
        n_samples=None if has_closed_tail else cfg.mc_samples,
        seed=None if has_closed_tail else cfg.seed,
        std_error=None if has_closed_tail else best_se,
        diagnostics=diagnostics + [f"sup attained near theta={best_theta:g}"],
    )


# ---------------------------------------------------------------------------
# p-value-matched random-set synthesizer
# ---------------------------------------------------------------------------

@dataclass
class PvalueMatchedSet:
    """The admissible predictive random set whose plausibility of the null
    equals the p-value: nested supports S_t with the natural measure
    inf over the null of P{T(X) < t} (or <= t under tail='strict')."""

    base: NestedRandomSet
    stat: TestStatistic
    null: Assertion
    tail: str
    theta_star: float

    def tstar(self, k: IntervalSet) -> float:
        """sup{t : S_t subset-of K} by bisection on the index."""
        s = self.base
        closed = k.closure()
        if not s.support(s.index_lo).is_subset_of(closed):
            return s.index_lo
        if s.support(s.index_hi).is_subset_of(closed):
            return s.index_hi
        a, b = s.index_lo, s.index_hi
        for _ in range(80):
            mid = 0.5 * (a + b)
            if s.support(mid).is_subset_of(closed):
                a = mid
            else:
                b = mid
        return a

    def null_plausibility(self, x: float) -> float:
        """pl_x(null; S) = 1 - P_S{S subset-of S_{T(x)}} (the containment
        identity of the construction; evaluated in the index space so the
        discrete tie convention carries through exactly)."""
        t_obs = self.stat.evaluate(x)
        return 1.0 - containment_prob(self.base, self.base.support(t_obs))


def synthesize_pvalue_prs(
    m: AssociationModel,
    stat: TestStatistic,
    null: Assertion,
    cfg: Optional[SupConfig] = None,
) -> PvalueMatchedSet:
    cfg = cfg or SupConfig()
    if null.is_empty:
        raise ValueError("null assertion is empty")
    is_point = all(iv.lo == iv.hi for iv in null.set.parts)
    if hasattr(m, "matched_prs_size") and (is_point or hasattr(m, "sup_boundary")):
        theta_star = null.set.parts[0].lo if is_point else m.sup_boundary(null.set)
        lo, hi = m.matched_prs_index_range(theta_star)
        size = lambda t: m.matched_prs_size(theta_star, t, cfg.tail)
        attainable = (
            m.matched_prs_attainable(theta_star)
            if hasattr(m, "matched_prs_attainable")
            else None
        )
        base = NestedRandomSet(
            index_lo=lo,
            index_hi=hi,
            support=lambda t: IntervalSet.closed(0.0, min(1.0, max(0.0, size(t)))),
            measure_of=lambda t: min(1.0, max(0.0, size(t))),
            shape="lower",
            attainable_sizes=attainable,
            label=f"pvalue-matched[{m.label}, tail={cfg.tail}]",
        )
        return PvalueMatchedSet(base=base, stat=stat, null=null, tail=cfg.tail,
                           theta_star=theta_star)
    return _synthesize_numeric(m, stat, null, cfg)


def _synthesize_numeric(m, stat, null, cfg: SupConfig) -> PvalueMatchedSet:
    """Generic path: grid sup over the null, monotone inversion over u."""
    thetas = _null_theta_grid(null.set, m.param_space, cfg.grid_initial)

    def g(u: float) -> float:
        return max(stat.on_aux(float(th), u) for th in thetas)

    lo_val, hi_val = g(1e-9), g(1.0 - 1e-9)
    increasing = hi_val >= lo_val

    def threshold(t: float) -> float:
        # boundary of {u : g(u) < t} for monotone g
        a, b = 1e-12, 1.0 - 1e-12
        if increasing:
            if g(a) >= t:
                return 0.0
            if g(b) < t:
                return 1.0
        else:
            if g(b) >= t:
                return 1.0
            if g(a) < t:
                return 0.0
        for _ in range(60):
            mid = 0.5 * (a + b)
            if (g(mid) < t) == increasing:
                a = mid
            else:
                b = mid
        return 0.5 * (a + b)

    if increasing:
        support = lambda t: IntervalSet.closed(0.0, threshold(t))
        size = threshold
        shape = "lower"
    else:
        support = lambda t: IntervalSet.closed(threshold(t), 1.0)
        size = lambda t: 1.0 - threshold(t)
        shape = "upper"

    t_lo = min(lo_val, hi_val)
    t_hi = max(lo_val, hi_val)
    base = NestedRandomSet(
        index_lo=t_lo,
        index_hi=t_hi,
        support=support,
        measure_of=size,
        shape=shape,
        label=f"pvalue-matched-numeric[{m.label}, tail={cfg.tail}]",
    )
    theta_star = float(thetas[-1])
    return PvalueMatchedSet(base=base, stat=stat, null=null, tail=cfg.tail,
                       theta_star=theta_star)


@dataclass
class EquivalenceReport:
    plausibility: float
    pvalue: float
    difference: float
    tolerance: float
    passed: bool
    method: str
    diagnostics: list = field(default_factory=list)


def plausibility_equals_pvalue(
    m: AssociationModel,
    stat: TestStatistic,
    null: Assertion,
    x: float,
    cfg: Optional[SupConfig] = None,
) -> EquivalenceReport:
    """Compute pl_x(null) with the synthesized random set and the p-value
    independently; report both with their difference."""
    cfg = cfg or SupConfig()
    t2 = synthesize_pvalue_prs(m, stat, null, cfg)
    pl = t2.null_plausibility(x)
    pv_report = pvalue(m, stat, null, x, cfg)
    pv = pv_report.plausibility
    if pv_report.method == "closed-form" and hasattr(m, "matched_prs_size"):
        tol = 1e-12
    elif pv_report.std_error is not None:
        tol = 3.0 * pv_report.std_error + 1e-9
    else:
        tol = 1e-6
    diff = abs(pl - pv)
    return EquivalenceReport(
        plausibility=pl,
        pvalue=pv,
        difference=diff,
        tolerance=tol,
        passed=diff <= tol,
        method=pv_report.method,
        diagnostics=pv_report.diagnostics,
    )


# ---------------------------------------------------------------------------
# Assumption checks (A1-A3)
# ---------------------------------------------------------------------------

@dataclass
class AssumptionReport:
    a1_passed: bool
    a2_passed: bool
    a3_passed: bool
    a1_witnesses: list = field(default_factory=list)
    notes: list = field(default_factory=list)

    @property
    def all_passed(self) -> bool:
        return self.a1_passed and self.a2_passed and self.a3_passed


def check_assumptions(
    m: AssociationModel,
    stat: TestStatistic,
    null: Assertion,
    x_grid: Sequence[float],
    u_grid: Optional[Sequence[float]] = None,
    t_grid: Optional[Sequence[float]] = None,
    mc_samples: int = 20_000,
    seed: int = 0,
) -> AssumptionReport:
    if u_grid is None:
        u_grid = np.linspace(0.02, 0.98, 25)
    notes: list[str] = []

    # A1: the focal set is nonempty for every (x, u) on the grid
    a1_witnesses = []
    for x in x_grid:
        for u in u_grid:
            if m.focal(float(x), float(u)).is_empty:
                a1_witnesses.append((float(x), float(u)))
    a1_passed = not a1_witnesses

    is_point = all(iv.lo == iv.hi for iv in null.set.parts)
    if is_point:
        notes.append("point null: A2 and A3 hold automatically")
        return AssumptionReport(a1_passed, True, True, a1_witnesses, notes)

    thetas = _null_theta_grid(null.set, m.param_space, 64)
    thetas_fine = _null_theta_grid(null.set, m.param_space, 512)

    def sup_t(u, ths):
        return max(stat.on_aux(float(th), u) for th in ths)

    # A2: the sup over the null is finite and stable under grid refinement
    sups = [sup_t(float(u), thetas) for u in u_grid]
    sups_fine = [sup_t(float(u), thetas_fine) for u in u_grid]
    finite = all(math.isfinite(v) for v in sups_fine)
    scale = max(1.0, max(abs(v) for v in sups_fine) if sups_fine else 1.0)
    stable = max(abs(a - b) for a, b in zip(sups, sups_fine)) <= 1e-3 * scale
    a2_passed = finite and stable
    if not finite:
        notes.append("A2: sup over the null is not finite on the u-grid")
    elif not stable:
        notes.append("A2: sup changes materially under null-grid refinement")

    # A3: P{sup_theta T(a(theta,U)) < t} == inf_theta P{T(a(theta,U)) < t}
    rng = make_rng(seed, 0)
    us = rng.random(mc_samples)
    sup_vals = np.array([sup_t(float(u), thetas) for u in us])
    step = max(1, len(thetas) // 16)
    theta_probe = list(thetas[::step])
    if theta_probe[-1] != thetas[-1]:
        theta_probe.append(thetas[-1])
    per_theta = {
        float(th): np.array([stat.on_aux(float(th), float(u)) for u in us])
        for th in theta_probe
    }
    if t_grid is None:
        qs = np.quantile(sup_vals, [0.1, 0.25, 0.5, 0.75, 0.9])
        t_grid = list(qs)
    a3_passed = True
    for t in t_grid:
        lhs = float((sup_vals < t).mean())
        rhs = min(float((vals < t).mean()) for vals in per_theta.values())
        se = math.sqrt(max(lhs * (1.0 - lhs), 1e-9) / mc_samples)
        if abs(lhs - rhs) > 3.0 * se + 0.005:
            a3_passed = False
            notes.append(f"A3 violated at t={t:g}: lhs={lhs:.4f} rhs={rhs:.4f}")
    return AssumptionReport(a1_passed, a2_passed, a3_passed, a1_witnesses, notes)
