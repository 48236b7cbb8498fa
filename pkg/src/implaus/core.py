"""Inferential-model core: associations, nested predictive random sets,
belief/plausibility evaluation, and plausibility regions.

The auxiliary space is always [0, 1] with a Uniform(0,1) auxiliary law.
Events in u-space and parameter sets are IntervalSet values.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .distributions import Distribution, Uniform01
from .intervals import IntervalSet


class EmptyFocalSetError(RuntimeError):
    """Raised when belief/plausibility is requested for a model whose focal
    sets are empty on a u-set of positive measure (parameter constraints).
    Carries a witness (x, u) pair."""

    def __init__(self, x, u, measure):
        self.x = x
        self.u = u
        self.measure = measure
        super().__init__(
            f"focal set is empty on a u-set of measure {measure:.6g} "
            f"(witness: x={x}, u={u:.6g}); refusing to evaluate"
        )


class UnsupportedModelError(RuntimeError):
    """The requested operation needs structure this model does not declare."""


# ---------------------------------------------------------------------------
# Assertions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Assertion:
    """A subset of the parameter space: points, intervals, half-lines,
    or finite unions thereof, together with the ambient space."""

    set: IntervalSet
    ambient: IntervalSet

    @classmethod
    def point(cls, theta: float, ambient: IntervalSet) -> "Assertion":
        return cls(IntervalSet.point(theta).intersect(ambient), ambient)

    @classmethod
    def interval(cls, lo, hi, ambient, lo_closed=True, hi_closed=True) -> "Assertion":
        return cls(
            IntervalSet.interval(lo, hi, lo_closed, hi_closed).intersect(ambient),
            ambient,
        )

    @classmethod
    def half_line(cls, bound, side: str, ambient, closed=True) -> "Assertion":
        if side == "le":
            s = IntervalSet.interval(-math.inf, bound, False, closed)
        elif side == "ge":
            s = IntervalSet.interval(bound, math.inf, closed, False)
        else:
            raise ValueError("side must be 'le' or 'ge'")
        return cls(s.intersect(ambient), ambient)

    @classmethod
    def union(cls, assertions: Sequence["Assertion"]) -> "Assertion":
        ambient = assertions[0].ambient
        return cls(IntervalSet.union_of([a.set for a in assertions]), ambient)

    @classmethod
    def everything(cls, ambient: IntervalSet) -> "Assertion":
        return cls(ambient, ambient)

    def complement(self) -> "Assertion":
        return Assertion(self.ambient.minus(self.set), self.ambient)

    def contains(self, theta: float) -> bool:
        return self.set.contains(theta)

    @property
    def is_empty(self) -> bool:
        return self.set.is_empty


# ---------------------------------------------------------------------------
# Association models
# ---------------------------------------------------------------------------

class AssociationModel:
    """The pair (a, P_U): a rule generating X from (theta, u) plus the
    auxiliary law, exposing the focal sets {theta : x = a(theta, u)}.

    Subclasses override the closed-form hooks where available; the
    defaults fall back to u-grid scans over the focal map.
    """

    label: str = "model"
    param_space: IntervalSet = IntervalSet.real_line()
    aux_law: Distribution = Uniform01()
    monotone_focal: bool = True

    def generate(self, theta: float, u: float) -> float:
        raise NotImplementedError

    def focal(self, x: float, u: float) -> IntervalSet:
        raise NotImplementedError

    def u_subset_event(self, x: float, pset: IntervalSet) -> IntervalSet:
        """The exact event {u : focal(x, u) subset-of pset}, no closure."""
        return grid_u_event(self, x, pset)

    def empty_focal_event(self, x: float) -> IntervalSet:
        """The u-set where the focal set is empty (parameter constraints)."""
        us = np.linspace(1e-9, 1 - 1e-9, 1025)
        flags = [self.focal(x, float(u)).is_empty for u in us]
        return _mask_to_intervals(us, flags)

    def simulate(self, theta: float, rng: np.random.Generator, size: int) -> np.ndarray:
        us = self.aux_law.sample(rng, size)
        return np.array([self.generate(theta, float(u)) for u in np.atleast_1d(us)])

    def assertion(self, *args, **kwargs):
        raise UnsupportedModelError("use Assertion constructors directly")


def _mask_to_intervals(us: np.ndarray, flags: Sequence[bool]) -> IntervalSet:
    parts = []
    start = None
    for u, f in zip(us, flags):
        if f and start is None:
            start = u
        elif not f and start is not None:
            parts.append(IntervalSet.closed(start, prev))
            start = None
        prev = u
    if start is not None:
        parts.append(IntervalSet.closed(start, us[-1]))
    return IntervalSet.union_of(parts)


def grid_u_event(
    model: AssociationModel,
    x: float,
    pset: IntervalSet,
    n: int = 10001,
    refine_steps: int = 60,
) -> IntervalSet:
    """Grid-scan evaluation of {u : focal(x,u) subset-of pset} with bisection
    refinement of the indicator boundaries.  Oracle / fallback path."""

    def pred(u: float) -> bool:
        return model.focal(x, u).is_subset_of(pset)

    us = np.linspace(0.0, 1.0, n)
    us[0], us[-1] = 1e-12, 1 - 1e-12
    flags = [pred(float(u)) for u in us]
    parts = []
    i = 0
    while i < n:
        if flags[i]:
            j = i
            while j + 1 < n and flags[j + 1]:
                j += 1
            lo = us[i]
            if i > 0:
                lo = _refine_boundary(pred, us[i - 1], us[i], refine_steps)
            hi = us[j]
            if j + 1 < n:
                hi = _refine_boundary(pred, us[j + 1], us[j], refine_steps)
            parts.append(IntervalSet.closed(min(lo, hi), max(lo, hi)))
            i = j + 1
        else:
            i += 1
    return IntervalSet.union_of(parts)


def _refine_boundary(pred, u_out, u_in, steps: int) -> float:
    # pred is False at u_out and True at u_in; converge from the True side
    for _ in range(steps):
        mid = 0.5 * (u_out + u_in)
        if pred(mid):
            u_in = mid
        else:
            u_out = mid
    return u_in


# ---------------------------------------------------------------------------
# Nested predictive random sets
# ---------------------------------------------------------------------------

@dataclass
class NestedRandomSet:
    """A totally ordered family {S_t} of closed subsets of [0,1] carrying the
    natural measure of P2: P_S{S subset-of K} = sup{measure_of(t) : S_t in K}.

    `shape` enables exact containment evaluation:
      - "lower":    S_t = [0, size(t)]
      - "upper":    S_t = [1 - size(t), 1]
      - "centered": S_t = [1/2 - size(t)/2, 1/2 + size(t)/2]
      - "custom":   containment found by monotone bisection on the index.
    `measure_from_size` maps the Lebesgue size of S_t to measure_of(t); for
    the natural measure it is the identity.  `attainable_sizes` restricts
    the family to a finite set of sizes (discrete test statistics).
    """

    index_lo: float
    index_hi: float
    support: Callable[[float], IntervalSet]
    measure_of: Callable[[float], float]
    shape: str = "custom"
    measure_from_size: Callable[[float], float] = lambda c: c
    attainable_sizes: Optional[Sequence[float]] = None
    label: str = "nested-random-set"


def one_sided_prs() -> NestedRandomSet:
    """S = [0, U), U ~ Unif(0,1): support S_t = [0, t], natural measure t."""
    return NestedRandomSet(
        index_lo=0.0,
        index_hi=1.0,
        support=lambda t: IntervalSet.closed(0.0, min(1.0, max(0.0, t))),
        measure_of=lambda t: min(1.0, max(0.0, t)),
        shape="lower",
        label="one-sided [0,U)",
    )


def symmetric_prs() -> NestedRandomSet:
    """S = {u : |u - 1/2| <= |U - 1/2|}: support [1/2 - t/2, 1/2 + t/2]."""
    def supp(t):
        t = min(1.0, max(0.0, t))
        return IntervalSet.closed(0.5 - t / 2.0, 0.5 + t / 2.0)

    return NestedRandomSet(
        index_lo=0.0,
        index_hi=1.0,
        support=supp,
        measure_of=lambda t: min(1.0, max(0.0, t)),
        shape="centered",
        label="symmetric about 1/2",
    )


def _snap_to_attainable(cap: float, sizes: Sequence[float]) -> float:
    best = 0.0
    for v in sizes:
        if v <= cap and v > best:
            best = v
    return best


def containment_prob(s: NestedRandomSet, event: IntervalSet) -> float:
    """P_S{S subset-of K} under the P2 natural-measure rule.

    Containment is evaluated against the component-wise closure of the
    event: each connected component is closed individually, but separate
    components are never merged, so punctured events stay punctured while
    boundary points of measure zero do not block containment.
    """
    if event.is_empty:
        return 0.0
    if s.shape == "lower":
        part = event.parts[0]
        if part.lo > 0.0:
            return 0.0
        cap = part.hi
    elif s.shape == "upper":
        part = event.parts[-1]
        if part.hi < 1.0:
            return 0.0
        cap = 1.0 - part.lo
    elif s.shape == "centered":
        cap = 0.0
        for part in event.parts:
            if part.lo <= 0.5 <= part.hi:
                cap = 2.0 * min(0.5 - part.lo, part.hi - 0.5)
                break
        else:
            return 0.0
    else:
        return _containment_prob_bisect(s, event)
    cap = min(1.0, max(0.0, cap))
    if s.attainable_sizes is not None:
        cap = _snap_to_attainable(cap, s.attainable_sizes)
    return min(1.0, max(0.0, s.measure_from_size(cap)))


def _containment_prob_bisect(s: NestedRandomSet, event: IntervalSet) -> float:
    closed = event.closure()

    def inside(t: float) -> bool:
        return s.support(t).is_subset_of(closed)

    lo_in = inside(s.index_lo)
    hi_in = inside(s.index_hi)
    if lo_in and hi_in:
        return min(1.0, max(0.0, max(s.measure_of(s.index_lo), s.measure_of(s.index_hi))))
    if not lo_in and not hi_in:
        return 0.0
    a, b = s.index_lo, s.index_hi
    for _ in range(80):
        mid = 0.5 * (a + b)
        if inside(mid) == lo_in:
            a = mid
        else:
            b = mid
    t_star = a if lo_in else b
    return min(1.0, max(0.0, s.measure_of(t_star)))


# ---------------------------------------------------------------------------
# Belief / plausibility
# ---------------------------------------------------------------------------

@dataclass
class PlausibilityReport:
    plausibility: float
    belief: float
    method: str = "closed-form"
    n_samples: Optional[int] = None
    seed: Optional[int] = None
    std_error: Optional[float] = None
    diagnostics: list = field(default_factory=list)

    @property
    def value(self) -> float:
        return self.plausibility

    @property
    def dual_belief(self) -> float:
        return self.belief


def _check_focal_nonempty(m: AssociationModel, x: float):
    ev = m.empty_focal_event(x)
    measure = ev.measure()
    if measure > 0.0:
        witness = 0.5 * (ev.parts[0].lo + ev.parts[0].hi)
        raise EmptyFocalSetError(x, witness, measure)


def focal_set(m: AssociationModel, x: float, u: float) -> IntervalSet:
    """The focal set {theta : x = a(theta, u)}.  May be empty under constraints."""
    return m.focal(x, u)


def combined_set(m: AssociationModel, x: float, s: IntervalSet) -> IntervalSet:
    """Union of focal sets over u in s, for monotone focal maps the hull of
    the endpoint focal sets per component."""
    if s.is_empty:
        return IntervalSet.empty()
    if all(iv.lo == iv.hi for iv in s.parts):
        return IntervalSet.union_of([m.focal(x, iv.lo) for iv in s.parts])
    if not m.monotone_focal:
        raise UnsupportedModelError(
            f"{m.label}: combined_set over interval u-sets needs a monotone focal map"
        )
    pieces = []
    for iv in s.parts:
        lo_u = max(iv.lo, 1e-12)
        hi_u = min(iv.hi, 1.0 - 1e-12)
        pieces.append(m.focal(x, lo_u).union(m.focal(x, hi_u)).hull())
    return IntervalSet.union_of(pieces)


def u_event(m: AssociationModel, x: float, a: Assertion) -> IntervalSet:
    """cl{u : focal(x,u) subset-of A} as closed intervals."""
    return m.u_subset_event(x, a.set).closure()


def belief(
    m: AssociationModel, x: float, s: NestedRandomSet, a: Assertion
) -> PlausibilityReport:
    _check_focal_nonempty(m, x)
    bel = containment_prob(s, m.u_subset_event(x, a.set))
    pl = 1.0 - containment_prob(s, m.u_subset_event(x, a.complement().set))
    return PlausibilityReport(plausibility=pl, belief=bel)


def plausibility(
    m: AssociationModel, x: float, s: NestedRandomSet, a: Assertion
) -> PlausibilityReport:
    return belief(m, x, s, a)


def plausibility_value(
    m: AssociationModel, x: float, s: NestedRandomSet, a: Assertion
) -> float:
    """Fast path: the plausibility number without report construction or
    the empty-focal check (callers audit in bulk after a one-time check)."""
    return 1.0 - containment_prob(s, m.u_subset_event(x, a.complement().set))


def plausibility_region(
    m: AssociationModel,
    x: float,
    s: NestedRandomSet,
    alpha: float,
    grid: Sequence[float],
    refine_steps: int = 40,
) -> IntervalSet:
    """{theta : pl_x({theta}; S) > alpha} as an interval hull with endpoints
    refined by bisection between bracketing grid points."""
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must be in (0,1), got {alpha}")
    _check_focal_nonempty(m, x)
    grid = sorted(grid)

    def pl_at(theta: float) -> float:
        return plausibility_value(m, x, s, Assertion.point(theta, m.param_space))

    vals = [pl_at(th) for th in grid]
    inside = [v > alpha for v in vals]
    if not any(inside):
        return IntervalSet.empty()
    i0 = inside.index(True)
    i1 = len(inside) - 1 - inside[::-1].index(True)
    lo = grid[i0]
    hi = grid[i1]
    if i0 > 0:
        a_, b_ = grid[i0 - 1], grid[i0]
        for _ in range(refine_steps):
            mid = 0.5 * (a_ + b_)
            if pl_at(mid) > alpha:
                b_ = mid
            else:
                a_ = mid
        lo = b_
    if i1 < len(grid) - 1:
        a_, b_ = grid[i1], grid[i1 + 1]
        for _ in range(refine_steps):
            mid = 0.5 * (a_ + b_)
            if pl_at(mid) > alpha:
                a_ = mid
            else:
                b_ = mid
        hi = a_
    return IntervalSet.closed(lo, hi)


# ---------------------------------------------------------------------------
# Admissibility checks (P1, P2)
# ---------------------------------------------------------------------------

@dataclass
class CheckReport:
    passed: bool
    failures: list = field(default_factory=list)
    notes: list = field(default_factory=list)


def check_admissible(
    s: NestedRandomSet, t_grid: Sequence[float], measure_tol: float = 1e-9
) -> CheckReport:
    """Verify P1 (closed, totally ordered by inclusion, spans the empty-set
    and full-set limits) and P2 (measure_of equals the Lebesgue measure of
    the support under Unif(0,1)) on the index grid."""
    failures: list[str] = []
    notes: list[str] = []
    t_grid = sorted(t_grid)
    supports = [s.support(t) for t in t_grid]
    for t, supp in zip(t_grid, supports):
        if not supp.all_closed():
            failures.append(f"P1a: S_{t:g} is not closed")
            break
    direction = 0  # +1 growing with t, -1 shrinking
    for (t1, s1), (t2, s2) in zip(
        zip(t_grid, supports), zip(t_grid[1:], supports[1:])
    ):
        fwd = s1.is_subset_of(s2)
        bwd = s2.is_subset_of(s1)
        if not (fwd or bwd):
            failures.append(f"P1b: S_{t1:g} and S_{t2:g} are not nested")
            continue
        d = 0 if (fwd and bwd) else (1 if fwd else -1)
        if d and direction and d != direction:
            failures.append(
                f"P1b: inclusion direction flips at t-pair ({t1:g}, {t2:g})"
            )
        direction = direction or d
    measures = []
    for t, supp in zip(t_grid, supports):
        m_claimed = s.measure_of(t)
        m_actual = supp.measure()
        measures.append(m_claimed)
        if not 0.0 <= m_claimed <= 1.0 + measure_tol:
            failures.append(f"P2: measure_of({t:g}) = {m_claimed:g} outside [0,1]")
        if abs(m_claimed - m_actual) > measure_tol:
            failures.append(
                f"P2: measure_of({t:g}) = {m_claimed:g} but P_U(S_t) = {m_actual:g}"
            )
    if measures:
        if min(measures) > 1e-6:
            notes.append("grid does not reach the empty-set limit (min measure "
                         f"{min(measures):.3g})")
        if max(measures) < 1.0 - 1e-6:
            notes.append("grid does not reach the full-set limit (max measure "
                         f"{max(measures):.3g})")
    return CheckReport(passed=not failures, failures=failures, notes=notes)
