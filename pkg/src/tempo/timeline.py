"""Rational time points, intervals and coalesced interval sets.

Finite time points are ``fractions.Fraction`` values; the two extremes are
represented by ``-math.inf`` and ``math.inf`` and never appear as closed
endpoints.  Floats are accepted only for those extremes.
"""

from __future__ import annotations

import re
from fractions import Fraction
from math import inf
from numbers import Rational
from typing import Iterable, Iterator, Optional, Union

from . import kernels

NEG_INF = -inf
POS_INF = inf

TimeLike = Union[int, Fraction, float, str]

_TIME_RE = re.compile(r"^\s*([+-]?)(?:(inf)|(\d+)(?:/(\d+)|\.(\d+))?)\s*$")


def as_time(value: TimeLike):
    """Coerce ``value`` to a canonical time point."""
    if isinstance(value, float):
        if value in (inf, -inf):
            return value
        raise TypeError(f"finite time points must be exact rationals, got float {value!r}")
    if isinstance(value, bool):
        raise TypeError("booleans are not time points")
    if isinstance(value, Rational):
        return _canon(Fraction(value))
    if isinstance(value, str):
        return parse_time(value)
    raise TypeError(f"not a time point: {value!r}")


def parse_time(text: str):
    m = _TIME_RE.match(text)
    if not m:
        raise ValueError(f"malformed time point {text!r}")
    sign, is_inf, whole, den, dec = m.groups()
    if is_inf:
        return NEG_INF if sign == "-" else POS_INF
    if den is not None:
        if int(den) == 0:
            raise ValueError(f"zero denominator in {text!r}")
        value = Fraction(int(whole), int(den))
    elif dec is not None:
        value = Fraction(f"{whole}.{dec}")
    else:
        value = Fraction(int(whole))
    return _canon(-value if sign == "-" else value)


def _canon(t: Fraction):
    # integral points are kept as int: equal and hash-equal to the Fraction, much faster to compare
    return t.numerator if t.denominator == 1 else t


def format_time(t) -> str:
    if t == POS_INF:
        return "+inf"
    if t == NEG_INF:
        return "-inf"
    t = Fraction(t)
    if t.denominator == 1:
        return str(t.numerator)
    return f"{t.numerator}/{t.denominator}"


class Interval(tuple):
    """A non-empty interval ``<lo, hi>`` of the rational timeline.

    Stored as the tuple ``(lo, lo_closed, hi, hi_closed)``, which is the layout
    the kernels operate on.
    """

    __slots__ = ()

    def __new__(cls, lo: TimeLike, hi: TimeLike, lo_closed: bool = True, hi_closed: bool = True):
        lo = as_time(lo)
        hi = as_time(hi)
        if lo == POS_INF or hi == NEG_INF:
            raise ValueError("interval cannot start at +inf or end at -inf")
        if lo == NEG_INF:
            if lo_closed:
                raise ValueError("an infinite endpoint cannot be closed")
        if hi == POS_INF:
            if hi_closed:
                raise ValueError("an infinite endpoint cannot be closed")
        if lo > hi or (lo == hi and not (lo_closed and hi_closed)):
            raise ValueError("empty interval")
        return tuple.__new__(cls, (lo, bool(lo_closed), hi, bool(hi_closed)))

    @classmethod
    def closed(cls, lo: TimeLike, hi: TimeLike) -> "Interval":
        """Closed interval, with infinite endpoints silently made open."""
        lo, hi = as_time(lo), as_time(hi)
        return cls(lo, hi, lo != NEG_INF, hi != POS_INF)

    @classmethod
    def point(cls, t: TimeLike) -> "Interval":
        return cls(t, t)

    @classmethod
    def everything(cls) -> "Interval":
        return _wrap((NEG_INF, False, POS_INF, False))

    @classmethod
    def parse(cls, text: str) -> "Interval":
        text = text.strip()
        if not text or text[0] not in "[(":
            return cls.point(parse_time(text))
        if text[-1] not in "])" or "," not in text:
            raise ValueError(f"malformed interval {text!r}")
        lo_text, hi_text = text[1:-1].split(",", 1)
        return cls(parse_time(lo_text), parse_time(hi_text), text[0] == "[", text[-1] == "]")

    lo = property(lambda self: tuple.__getitem__(self, 0))
    lo_closed = property(lambda self: tuple.__getitem__(self, 1))
    hi = property(lambda self: tuple.__getitem__(self, 2))
    hi_closed = property(lambda self: tuple.__getitem__(self, 3))

    @property
    def punctual(self) -> bool:
        return self[0] == self[2]

    @property
    def bounded(self) -> bool:
        return self[0] != NEG_INF and self[2] != POS_INF

    @property
    def infimum(self):
        return self[0]

    @property
    def supremum(self):
        return self[2]

    def __contains__(self, t) -> bool:
        lo, lc, hi, hc = self
        return (lo < t or (lc and lo == t)) and (t < hi or (hc and t == hi))

    def issuperset(self, other: "Interval") -> bool:
        return kernels.covers((self,), other)

    def __str__(self) -> str:
        if self.punctual:
            return f"[{format_time(self[0])},{format_time(self[0])}]"
        return "{}{},{}{}".format(
            "[" if self[1] else "(", format_time(self[0]), format_time(self[2]), "]" if self[3] else ")"
        )

    def __repr__(self) -> str:
        return f"Interval({self})"

    def __getnewargs__(self):
        return (self[0], self[2], self[1], self[3])


def _wrap(t) -> Interval:
    return tuple.__new__(Interval, t)


def member_of(t: TimeLike, a: Interval) -> bool:
    return as_time(t) in a


def superset_of(a: Interval, b: Interval) -> bool:
    return a.issuperset(b)


def infimum(a: Interval):
    return a[0]


def supremum(a: Interval):
    return a[2]


def intersect(a: Interval, b: Interval) -> Optional[Interval]:
    r = kernels.iv_intersect(a, b)
    return None if r is None else _wrap(r)


def minkowski_sum(a: Interval, b: Interval) -> Interval:
    return _wrap(kernels.iv_add(a, b))


def minkowski_diff(a: Interval, b: Interval) -> Interval:
    return _wrap(kernels.iv_sub(a, b))


def link(a: Interval, b: Interval) -> Optional[Interval]:
    """Closed hull of ``a | b`` minus those hull endpoints that lie in ``a | b``.

    Returns ``None`` when that removes everything (``a`` and ``b`` the same point).
    """
    if a[0] < b[0] or (a[0] == b[0] and a[1]):
        lo, lc = a[0], a[1]
    else:
        lo, lc = b[0], b[1]
    if a[2] > b[2] or (a[2] == b[2] and a[3]):
        hi, hc = a[2], a[3]
    else:
        hi, hc = b[2], b[3]
    # an endpoint of the hull belongs to the union iff the extreme member includes it
    lo_closed = lo != NEG_INF and not lc
    hi_closed = hi != POS_INF and not hc
    if lo > hi or (lo == hi and not (lo_closed and hi_closed)):
        return None
    return _wrap((lo, lo_closed, hi, hi_closed))


class IntervalSet:
    """An immutable, canonical (sorted, disjoint, non-mergeable) set of intervals."""

    __slots__ = ("intervals",)

    def __init__(self, intervals: Iterable[Interval] = ()):
        self.intervals = tuple(_wrap(t) for t in kernels.coalesce(list(intervals)))

    @classmethod
    def _canonical(cls, members) -> "IntervalSet":
        s = object.__new__(cls)
        s.intervals = tuple(m if type(m) is Interval else _wrap(m) for m in members)
        return s

    @classmethod
    def empty(cls) -> "IntervalSet":
        return _EMPTY

    def __iter__(self) -> Iterator[Interval]:
        return iter(self.intervals)

    def __len__(self) -> int:
        return len(self.intervals)

    def __bool__(self) -> bool:
        return bool(self.intervals)

    def __getitem__(self, i) -> Interval:
        return self.intervals[i]

    def __eq__(self, other) -> bool:
        if isinstance(other, IntervalSet):
            return self.intervals == other.intervals
        return NotImplemented

    def __hash__(self) -> int:
        return hash(self.intervals)

    def covers(self, iv: Interval) -> bool:
        return kernels.covers(self.intervals, iv)

    def __contains__(self, t) -> bool:
        return kernels.contains_point(self.intervals, as_time(t))

    def issubset(self, other: "IntervalSet") -> bool:
        return kernels.subset(self.intervals, other.intervals)

    def union(self, other: "IntervalSet") -> "IntervalSet":
        return IntervalSet._canonical(kernels.union(self.intervals, other.intervals))

    def intersection(self, other: "IntervalSet") -> "IntervalSet":
        return IntervalSet._canonical(kernels.intersect(self.intervals, other.intervals))

    def restrict(self, iv: Interval) -> "IntervalSet":
        return IntervalSet._canonical(kernels.intersect(self.intervals, (iv,)))

    def __str__(self) -> str:
        return "{" + ", ".join(str(iv) for iv in self.intervals) + "}"

    def __repr__(self) -> str:
        return f"IntervalSet({self})"


_EMPTY = IntervalSet._canonical(())


def coalesce(intervals: Iterable[Interval]) -> IntervalSet:
    return IntervalSet(intervals)
