from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from tempo.timeline import (
    NEG_INF,
    POS_INF,
    Interval,
    IntervalSet,
    as_time,
    coalesce,
    format_time,
    infimum,
    intersect,
    link,
    member_of,
    minkowski_diff,
    minkowski_sum,
    parse_time,
    superset_of,
    supremum,
)


def iv(text):
    return Interval.parse(text)


def test_time_points_are_exact():
    assert as_time("3/2") == Fraction(3, 2)
    assert as_time("-7/4") == Fraction(-7, 4)
    assert as_time("6/3") == 2
    assert parse_time("+inf") == POS_INF and parse_time("-inf") == NEG_INF
    assert format_time(Fraction(3, 2)) == "3/2" and format_time(4) == "4"
    with pytest.raises(TypeError):
        as_time(0.5)
    with pytest.raises(ValueError):
        parse_time("1/0")


def test_interval_invariants():
    with pytest.raises(ValueError):
        Interval(2, 1)
    with pytest.raises(ValueError):
        Interval(1, 1, True, False)
    assert Interval.point(3).punctual
    assert Interval(1, 2).bounded and not Interval.everything().bounded
    assert str(Interval.everything()) == "(-inf,+inf)"
    with pytest.raises(ValueError):
        Interval(NEG_INF, 3)
    assert Interval(NEG_INF, 3, False, True).lo == NEG_INF


def test_intersect_examples():
    assert intersect(iv("[1,5]"), iv("[3,8]")) == iv("[3,5]")
    assert intersect(iv("[1,2]"), iv("(2,3]")) is None
    assert intersect(iv("[0,0]"), iv("[0,4)")) == iv("[0,0]")


def test_coalesce_examples():
    assert list(coalesce([iv("[1,2]"), iv("(2,3]")])) == [iv("[1,3]")]
    assert list(coalesce([iv("[1,2)"), iv("(2,3]")])) == [iv("[1,2)"), iv("(2,3]")]
    assert list(coalesce([])) == []


def test_minkowski_examples():
    assert minkowski_sum(iv("[8,8]"), iv("[0,2]")) == iv("[8,10]")
    assert minkowski_sum(iv("[0,0]"), iv("[0,0]")) == iv("[0,0]")
    assert minkowski_sum(iv("[1,2)"), iv("(0,1]")) == iv("(1,3)")
    assert minkowski_diff(iv("[8,9]"), iv("[0,1]")) == iv("[7,9]")
    assert minkowski_sum(iv("[0,+inf)"), iv("[1,2]")) == iv("[1,+inf)")


def test_link_examples():
    assert link(iv("[3,3]"), iv("[5,5]")) == iv("(3,5)")
    assert link(iv("[1,2]"), iv("[5,6]")) == iv("(1,6)")
    # 1 and 6 both belong to the union, so both are removed from the hull
    assert link(iv("[1,2)"), iv("(5,6]")) == iv("(1,6)")
    # hull endpoints outside the union stay closed
    assert link(iv("(1,2]"), iv("[5,6)")) == iv("[1,6]")


def test_membership_and_bounds():
    assert member_of(2, iv("[1,2]"))
    assert not member_of(2, iv("[1,2)"))
    assert supremum(iv("(0,+inf)")) == POS_INF
    assert infimum(iv("(0,1]")) == 0
    assert superset_of(iv("[0,3]"), iv("(1,3]"))
    assert not superset_of(iv("[0,3)"), iv("(1,3]"))


def test_interval_set_queries():
    s = IntervalSet([iv("[1,2)"), iv("(2,3]"), iv("[5,6]")])
    assert s.covers(iv("[1,3/2]")) and not s.covers(iv("[1,3]"))
    assert 2 not in s and Fraction(5, 2) in s
    assert s.restrict(iv("[2,5]")) == IntervalSet([iv("(2,3]"), iv("[5,5]")])
    assert s.union(IntervalSet([iv("[2,2]")])) == IntervalSet([iv("[1,3]"), iv("[5,6]")])


# properties over integer-endpoint intervals, checked on a half-integer grid

GRID = [Fraction(k, 2) for k in range(-4, 25)]


@st.composite
def intervals(draw, lo=-1, hi=10):
    a = draw(st.integers(lo, hi))
    b = draw(st.integers(a, hi))
    if a == b:
        return Interval(a, a)
    return Interval(a, b, draw(st.booleans()), draw(st.booleans()))


@given(st.lists(intervals(), max_size=6))
def test_coalesce_idempotent_and_pointwise(ivs):
    s = coalesce(ivs)
    assert coalesce(list(s)) == s
    members = list(s)
    for x, y in zip(members, members[1:]):
        assert link(x, y) is not None and x.hi <= y.lo
    for t in GRID:
        assert (t in s) == any(t in x for x in ivs)


@given(intervals(), intervals())
def test_intersect_pointwise(a, b):
    c = intersect(a, b)
    for t in GRID:
        assert (c is not None and t in c) == (t in a and t in b)


@given(intervals(), intervals())
def test_link_symmetric(a, b):
    assert link(a, b) == link(b, a)


@given(intervals(0, 5), intervals(0, 5))
def test_minkowski_sum_pointwise(a, b):
    s = minkowski_sum(a, b)
    quarter = [Fraction(k, 4) for k in range(-4, 48)]
    for x in quarter:
        for y in quarter:
            if x in a and y in b:
                assert x + y in s
    # every sampled point of the sum decomposes into points of the operands
    for t in quarter:
        if t in s:
            assert any(t - y in a for y in [Fraction(k, 8) for k in range(-8, 96)] if y in b)
