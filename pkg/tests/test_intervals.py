import math

import pytest
from hypothesis import given, strategies as st

from implaus.intervals import Interval, IntervalSet


def test_point_interval_is_closed():
    iv = Interval(0.5, 0.5)
    assert iv.contains(0.5)
    assert iv.length == 0.0


def test_degenerate_open_point_rejected():
    with pytest.raises(ValueError):
        Interval(0.5, 0.5, lo_closed=False)
    with pytest.raises(ValueError):
        Interval(1.0, 0.0)


def test_infinite_endpoints_forced_open():
    iv = Interval(-math.inf, 0.0, True, True)
    assert not iv.lo_closed
    assert iv.hi_closed


def test_endpoint_flags_in_containment():
    half_open = Interval(0.0, 1.0, True, False)
    assert half_open.contains(0.0)
    assert not half_open.contains(1.0)


def test_closed_not_subset_of_half_open():
    # [0, c] is not a subset of [0, c)
    closed = IntervalSet.closed(0.0, 0.3)
    half = IntervalSet.interval(0.0, 0.3, True, False)
    assert not closed.is_subset_of(half)
    assert half.is_subset_of(closed)


def test_union_merges_touching_when_either_end_closed():
    a = IntervalSet.interval(0.0, 0.5, True, False)
    b = IntervalSet.interval(0.5, 1.0, True, True)
    merged = a.union(b)
    assert len(merged.parts) == 1
    assert merged.parts[0].lo == 0.0 and merged.parts[0].hi == 1.0


def test_union_keeps_puncture_when_both_ends_open():
    a = IntervalSet.interval(0.0, 0.5, True, False)
    b = IntervalSet.interval(0.5, 1.0, False, True)
    punctured = a.union(b)
    assert len(punctured.parts) == 2
    assert not punctured.contains(0.5)
    assert punctured.closure().contains(0.5)
    assert len(punctured.closure().parts) == 1


def test_complement_within_unit_interval():
    s = IntervalSet.interval(0.2, 0.6, True, False)
    comp = s.complement(IntervalSet.closed(0.0, 1.0))
    assert comp.contains(0.6)
    assert not comp.contains(0.2)
    assert math.isclose(comp.measure(), 0.6)


def test_minus_and_intersect():
    a = IntervalSet.closed(0.0, 1.0)
    b = IntervalSet.point(0.4)
    punctured = a.minus(b)
    assert not punctured.contains(0.4)
    assert punctured.contains(0.39999)
    assert a.intersect(b) == b


def test_measure_additive():
    s = IntervalSet.union_of([
        IntervalSet.closed(0.0, 0.25),
        IntervalSet.closed(0.5, 1.0),
    ])
    assert math.isclose(s.measure(), 0.75)


def test_hull_and_bounds():
    s = IntervalSet.union_of([IntervalSet.closed(0.1, 0.2), IntervalSet.closed(0.8, 0.9)])
    assert s.infimum() == 0.1
    assert s.supremum() == 0.9
    assert s.hull() == IntervalSet.closed(0.1, 0.9)


def test_empty_set_behaviour():
    e = IntervalSet.empty()
    assert e.is_empty
    assert e.measure() == 0.0
    assert e.is_subset_of(IntervalSet.point(0.0))
    with pytest.raises(ValueError):
        e.infimum()


finite = st.floats(min_value=-50, max_value=50, allow_nan=False)


@st.composite
def interval_sets(draw, max_parts=4):
    parts = []
    for _ in range(draw(st.integers(0, max_parts))):
        a, b = sorted([draw(finite), draw(finite)])
        lc, hc = draw(st.booleans()), draw(st.booleans())
        if a == b:
            lc = hc = True
        parts.append(Interval(a, b, lc, hc))
    return IntervalSet(parts)


@given(interval_sets(), interval_sets())
def test_union_contains_both(a, b):
    u = a.union(b)
    assert a.is_subset_of(u)
    assert b.is_subset_of(u)


@given(interval_sets(), interval_sets())
def test_intersection_contained_in_both(a, b):
    i = a.intersect(b)
    assert i.is_subset_of(a)
    assert i.is_subset_of(b)


@given(interval_sets(), finite)
def test_complement_partitions_points(s, x):
    comp = s.complement()
    assert s.contains(x) != comp.contains(x)


@given(interval_sets())
def test_double_complement_roundtrip(s):
    assert s.complement().complement() == s


@given(interval_sets())
def test_normalization_idempotent(s):
    assert IntervalSet(s.parts) == s
