"""Finite unions of real intervals with open/closed endpoints.

Both auxiliary-space events (subsets of [0,1]) and parameter sets are
represented this way.  Endpoint flags matter: containment tests such as
``[0, c] subset-of [0, c)`` must come out False, and punctured sets like
``[0, u0) | (u0, 1]`` must stay punctured until an explicit closure.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

INF = math.inf


@dataclass(frozen=True)
class Interval:
    """A single nonempty interval.  lo == hi means a point (both ends closed)."""

    lo: float
    hi: float
    lo_closed: bool = True
    hi_closed: bool = True

    def __post_init__(self):
        if math.isnan(self.lo) or math.isnan(self.hi):
            raise ValueError("interval endpoints must not be NaN")
        if self.lo > self.hi:
            raise ValueError(f"empty interval ({self.lo}, {self.hi})")
        if self.lo == self.hi and not (self.lo_closed and self.hi_closed):
            raise ValueError("degenerate interval must be a closed point")
        if math.isinf(self.lo) and self.lo_closed:
            object.__setattr__(self, "lo_closed", False)
        if math.isinf(self.hi) and self.hi_closed:
            object.__setattr__(self, "hi_closed", False)

    def contains(self, x: float) -> bool:
        if x < self.lo or x > self.hi:
            return False
        if x == self.lo and not self.lo_closed:
            return False
        if x == self.hi and not self.hi_closed:
            return False
        return True

    @property
    def length(self) -> float:
        return self.hi - self.lo

    def covers(self, other: "Interval") -> bool:
        """True iff other is a subset of this single interval."""
        lo_ok = self.lo < other.lo or (
            self.lo == other.lo and (self.lo_closed or not other.lo_closed)
        )
        hi_ok = self.hi > other.hi or (
            self.hi == other.hi and (self.hi_closed or not other.hi_closed)
        )
        return lo_ok and hi_ok

    def __repr__(self):
        lb = "[" if self.lo_closed else "("
        rb = "]" if self.hi_closed else ")"
        return f"{lb}{self.lo:g}, {self.hi:g}{rb}"


def _touch_or_overlap(a: Interval, b: Interval) -> bool:
    """b.lo is assumed >= a.lo.  True if a and b can be merged into one interval."""
    if b.lo < a.hi:
        return True
    if b.lo == a.hi:
        return a.hi_closed or b.lo_closed
    return False


class IntervalSet:
    """A normalized (sorted, disjoint, maximal) finite union of intervals."""

    __slots__ = ("parts",)

    def __init__(self, parts: Iterable[Interval] = ()):
        items = sorted(parts, key=lambda iv: (iv.lo, not iv.lo_closed))
        merged: list[Interval] = []
        for iv in items:
            if merged and _touch_or_overlap(merged[-1], iv):
                last = merged[-1]
                if iv.hi > last.hi:
                    hi, hc = iv.hi, iv.hi_closed
                elif iv.hi == last.hi:
                    hi, hc = last.hi, last.hi_closed or iv.hi_closed
                else:
                    hi, hc = last.hi, last.hi_closed
                merged[-1] = Interval(last.lo, hi, last.lo_closed, hc)
            else:
                merged.append(iv)
        self.parts = tuple(merged)

    # ---- constructors -------------------------------------------------

    @classmethod
    def empty(cls) -> "IntervalSet":
        return cls(())

    @classmethod
    def point(cls, x: float) -> "IntervalSet":
        return cls((Interval(x, x),))

    @classmethod
    def closed(cls, lo: float, hi: float) -> "IntervalSet":
        return cls((Interval(lo, hi, True, True),))

    @classmethod
    def interval(cls, lo, hi, lo_closed=True, hi_closed=True) -> "IntervalSet":
        if lo > hi or (lo == hi and not (lo_closed and hi_closed)):
            return cls.empty()
        return cls((Interval(lo, hi, lo_closed, hi_closed),))

    @classmethod
    def real_line(cls) -> "IntervalSet":
        return cls((Interval(-INF, INF, False, False),))

    @classmethod
    def union_of(cls, sets: Iterable["IntervalSet"]) -> "IntervalSet":
        parts: list[Interval] = []
        for s in sets:
            parts.extend(s.parts)
        return cls(parts)

    # ---- queries ------------------------------------------------------

    @property
    def is_empty(self) -> bool:
        return not self.parts

    def contains(self, x: float) -> bool:
        return any(iv.contains(x) for iv in self.parts)

    def measure(self) -> float:
        return sum(iv.length for iv in self.parts)

    def is_subset_of(self, other: "IntervalSet") -> bool:
        j = 0
        for p in self.parts:
            # skip candidates that end before p can fit inside them; a part
            # ending exactly at p.lo only qualifies when p is that point
            while j < len(other.parts) and (
                other.parts[j].hi < p.lo
                or (
                    other.parts[j].hi == p.lo
                    and (p.hi > p.lo or not (other.parts[j].hi_closed and p.lo_closed))
                )
            ):
                j += 1
            if j >= len(other.parts) or not other.parts[j].covers(p):
                return False
        return True

    def infimum(self) -> float:
        if self.is_empty:
            raise ValueError("empty set has no infimum")
        return self.parts[0].lo

    def supremum(self) -> float:
        if self.is_empty:
            raise ValueError("empty set has no supremum")
        return self.parts[-1].hi

    def all_closed(self) -> bool:
        return all(
            (iv.lo_closed or math.isinf(iv.lo)) and (iv.hi_closed or math.isinf(iv.hi))
            for iv in self.parts
        )

    # ---- algebra ------------------------------------------------------

    def union(self, other: "IntervalSet") -> "IntervalSet":
        return IntervalSet(self.parts + other.parts)

    def intersect(self, other: "IntervalSet") -> "IntervalSet":
        out: list[Interval] = []
        for a in self.parts:
            for b in other.parts:
                if b.lo > a.hi:
                    break
                if a.lo > b.hi:
                    continue
                lo = max(a.lo, b.lo)
                hi = min(a.hi, b.hi)
                lc = (a.lo_closed if a.lo == lo else True) and (
                    b.lo_closed if b.lo == lo else True
                )
                hc = (a.hi_closed if a.hi == hi else True) and (
                    b.hi_closed if b.hi == hi else True
                )
                if lo < hi or (lo == hi and lc and hc):
                    out.append(Interval(lo, hi, lc, hc))
        return IntervalSet(out)

    def complement(self, within: "IntervalSet | None" = None) -> "IntervalSet":
        """Complement relative to `within` (default: the whole real line)."""
        gaps: list[Interval] = []
        cursor, cursor_closed = -INF, False
        for iv in self.parts:
            if cursor < iv.lo or (cursor == iv.lo and cursor_closed and not iv.lo_closed):
                lo_c = cursor_closed
                if cursor < iv.lo or (lo_c and not iv.lo_closed):
                    try:
                        gaps.append(Interval(cursor, iv.lo, lo_c, not iv.lo_closed))
                    except ValueError:
                        pass
            cursor, cursor_closed = iv.hi, not iv.hi_closed
        if cursor < INF:
            gaps.append(Interval(cursor, INF, cursor_closed, False))
        elif not self.parts:
            gaps.append(Interval(-INF, INF, False, False))
        comp = IntervalSet(gaps)
        if within is None:
            return comp
        return comp.intersect(within)

    def minus(self, other: "IntervalSet") -> "IntervalSet":
        return self.intersect(other.complement())

    def closure(self) -> "IntervalSet":
        return IntervalSet(
            Interval(
                iv.lo,
                iv.hi,
                iv.lo_closed or not math.isinf(iv.lo),
                iv.hi_closed or not math.isinf(iv.hi),
            )
            for iv in self.parts
        )

    def hull(self) -> "IntervalSet":
        if self.is_empty:
            return IntervalSet.empty()
        first, last = self.parts[0], self.parts[-1]
        return IntervalSet(
            (Interval(first.lo, last.hi, first.lo_closed, last.hi_closed),)
        )

    # ---- misc ---------------------------------------------------------

    def __eq__(self, other):
        return isinstance(other, IntervalSet) and self.parts == other.parts

    def __hash__(self):
        return hash(self.parts)

    def __repr__(self):
        if self.is_empty:
            return "IntervalSet(empty)"
        return " | ".join(repr(iv) for iv in self.parts)
