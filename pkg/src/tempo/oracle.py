"""Brute-force pointwise reference semantics on an integer cell grid.

With integer endpoints everywhere, every metric atom has constant truth on
each integer point and on each open unit interval between them ("cells").
The oracle stores truth as one bit per cell and checks each operator's
pointwise condition directly, without the interval kernels.  It exists only
to cross-check the engine on small instances.
"""

from __future__ import annotations

from fractions import Fraction
from math import floor, inf
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from .syntax import (
    BoxMinus,
    BoxPlus,
    Constant,
    Dataset,
    DiamondPlus,
    Fact,
    Falsehood,
    MetricAtom,
    Program,
    RelationalAtom,
    Rule,
    Since,
    Truth,
    Until,
    _Binary,
    _Unary,
    ground_instances,
)
from .timeline import Interval

MAX_CONSTANTS = 6


class OracleLimitError(ValueError):
    """The instance is outside what the oracle can decide exactly."""


def _is_int(x) -> bool:
    return x in (inf, -inf) or Fraction(x).denominator == 1


class Grid:
    """Cells ``(-inf,A)``, ``A``, ``(A,A+1)``, ..., ``B``, ``(B,+inf)``."""

    def __init__(self, lo: int, hi: int):
        self.lo = lo
        self.hi = hi
        self.size = 2 * (hi - lo) + 3
        self.full = (1 << self.size) - 1

    def cell_of(self, t) -> int:
        if t < self.lo:
            return 0
        if t > self.hi:
            return self.size - 1
        k = floor(t)
        base = 1 + 2 * (k - self.lo)
        return base if t == k else base + 1

    def bounds(self, c: int):
        """``(lo, lo_closed, hi, hi_closed)`` of cell ``c``."""
        if c == 0:
            return (-inf, False, Fraction(self.lo), False)
        if c == self.size - 1:
            return (Fraction(self.hi), False, inf, False)
        k = self.lo + (c - 1) // 2
        if (c - 1) % 2 == 0:
            return (Fraction(k), True, Fraction(k), True)
        return (Fraction(k), False, Fraction(k + 1), False)

    def rep(self, c: int) -> Fraction:
        lo, _, hi, _ = self.bounds(c)
        if lo == -inf:
            return hi - Fraction(1, 2)
        if hi == inf:
            return lo + Fraction(1, 2)
        return (lo + hi) / 2

    def is_open(self, c: int) -> bool:
        lo, _, hi, _ = self.bounds(c)
        return lo != hi

    def meeting(self, lo, lc, hi, hc) -> Optional[Tuple[int, int]]:
        """Index range of cells meeting the (possibly empty) interval."""
        if lo > hi or (lo == hi and not (lc and hc)):
            return None
        i = self.cell_of(lo) if lo != -inf else 0
        if lo != -inf and not lc and self.bounds(i)[0] == self.bounds(i)[2]:
            i += 1  # open at an integer point: starts in the cell after it
        j = self.cell_of(hi) if hi != inf else self.size - 1
        if hi != inf and not hc and self.bounds(j)[0] == self.bounds(j)[2]:
            j -= 1
        return (i, j) if i <= j else None

    def cells_of(self, iv: Interval) -> int:
        r = self.meeting(iv.lo, iv.lo_closed, iv.hi, iv.hi_closed)
        if r is None:
            return 0
        i, j = r
        return ((1 << (j - i + 1)) - 1) << i


def _shift(t, w: Interval, sign: int):
    """``t + w`` (sign=1) or ``t - w`` (sign=-1) as a raw endpoint tuple."""
    if sign > 0:
        return (t + w.lo, w.lo_closed, t + w.hi, w.hi_closed)
    return (t - w.hi, w.hi_closed, t - w.lo, w.lo_closed)


def _bit(bits: int, c: int) -> bool:
    return (bits >> c) & 1 == 1


def _all(bits: int, i: int, j: int) -> bool:
    mask = ((1 << (j - i + 1)) - 1) << i
    return bits & mask == mask


class CellModel:
    """Truth of ground relational atoms as per-cell bitsets."""

    def __init__(self, grid: Grid, table: Optional[Dict[RelationalAtom, int]] = None):
        self.grid = grid
        self.table: Dict[RelationalAtom, int] = dict(table or {})
        self._memo: Dict[MetricAtom, int] = {}

    @classmethod
    def from_facts(cls, grid: Grid, facts: Iterable[Fact]) -> "CellModel":
        m = cls(grid)
        for f in facts:
            m.table[f.atom] = m.table.get(f.atom, 0) | grid.cells_of(f.interval)
        return m

    def bits(self, m: MetricAtom) -> int:
        """Cells where ground ``m`` holds, evaluated at each cell's representative."""
        if isinstance(m, RelationalAtom):
            return self.table.get(m, 0)
        if isinstance(m, Truth):
            return self.grid.full
        if isinstance(m, Falsehood):
            return 0
        cached = self._memo.get(m)
        if cached is None:
            cached = 0
            for c in range(self.grid.size):
                if self.holds(m, self.grid.rep(c)):
                    cached |= 1 << c
            self._memo[m] = cached
        return cached

    def holds(self, m: MetricAtom, t) -> bool:
        """Pointwise truth of ground ``m`` at rational ``t``."""
        g = self.grid
        if isinstance(m, (RelationalAtom, Truth, Falsehood)):
            return _bit(self.bits(m), g.cell_of(t))
        if isinstance(m, _Unary):
            inner = self.bits(m.operand)
            sign = 1 if isinstance(m, (BoxPlus, DiamondPlus)) else -1
            r = g.meeting(*_shift(t, m.interval, sign))
            if r is None:
                return isinstance(m, (BoxPlus, BoxMinus))
            if isinstance(m, (BoxPlus, BoxMinus)):
                return _all(inner, *r)
            return inner & (((1 << (r[1] - r[0] + 1)) - 1) << r[0]) != 0
        if isinstance(m, Until):
            return self._until(m, t, 1)
        if isinstance(m, Since):
            return self._until(m, t, -1)
        raise TypeError(f"cannot evaluate {m!r}")

    def _until(self, m: _Binary, t, sign: int) -> bool:
        # exists t1 in t +/- w with the right operand at t1 and the left one strictly between
        g = self.grid
        m1 = self.bits(m.right)
        m2 = self.bits(m.left)
        x = _shift(t, m.interval, sign)
        r = g.meeting(*x)
        if r is None:
            return False
        ct = g.cell_of(t)
        if _bit(m1, ct):
            if m.interval.lo == 0 and m.interval.lo_closed:
                return True
            lo, lc, hi, hc = g.bounds(ct)
            rest = (t, False, hi, hc) if sign > 0 else (lo, lc, t, False)
            if _bit(m2, ct) and _meets(x, rest):
                return True
        stop = r[1] if sign > 0 else r[0]
        if (stop - ct) * sign <= 0:
            return False
        # the left operand must cover the rest of ct (when open) and every cell up to c1
        ok = not g.is_open(ct) or _bit(m2, ct)
        c1 = ct + sign
        while ok:
            in_range = r[0] <= c1 <= r[1]
            if in_range and _bit(m1, c1) and (not g.is_open(c1) or _bit(m2, c1)):
                return True
            if c1 == stop:
                return False
            ok = _bit(m2, c1)
            c1 += sign
        return False


def _meets(x, y) -> bool:
    lo, lc = (x[0], x[1]) if x[0] > y[0] else (y[0], y[1]) if y[0] > x[0] else (x[0], x[1] and y[1])
    hi, hc = (x[2], x[3]) if x[2] < y[2] else (y[2], y[3]) if y[2] < x[2] else (x[2], x[3] and y[3])
    return lo < hi or (lo == hi and lc and hc)


def _probe_margin(metrics: Iterable[MetricAtom]) -> int:
    total = 0

    def reach(m: MetricAtom) -> int:
        if isinstance(m, _Unary):
            return _finite_hi(m.interval) + reach(m.operand)
        if isinstance(m, _Binary):
            return _finite_hi(m.interval) + max(reach(m.left), reach(m.right))
        return 0

    for m in metrics:
        total = max(total, reach(m))
    return total + 2


def _finite_hi(w: Interval) -> int:
    if w.hi == inf:
        raise OracleLimitError(f"oracle needs bounded operator intervals, got {w}")
    if not (_is_int(w.lo) and _is_int(w.hi)):
        raise OracleLimitError(f"oracle needs integer operator intervals, got {w}")
    return int(w.hi)


def _endpoint_range(intervals: Iterable[Interval]) -> Tuple[int, int]:
    points: List[int] = []
    for iv in intervals:
        for x in (iv.lo, iv.hi):
            if x in (inf, -inf):
                continue
            if not _is_int(x):
                raise OracleLimitError(f"oracle needs integer endpoints, got {iv}")
            points.append(int(x))
    if not points:
        return (0, 0)
    return (min(points), max(points))


def store_model(store: Mapping[RelationalAtom, Sequence[Interval]], metrics: Iterable[MetricAtom],
                probes: Iterable = ()) -> CellModel:
    """A cell model of a fact store, wide enough to evaluate ``metrics`` at ``probes``."""
    facts = [Fact(a, iv) for a, ivs in store.items() for iv in ivs]
    lo, hi = _endpoint_range([f.interval for f in facts])
    for t in probes:
        lo, hi = min(lo, floor(t)), max(hi, floor(t) + 1)
    margin = _probe_margin(metrics)
    return CellModel.from_facts(Grid(lo - margin, hi + margin), facts)


def oracle_holds(store: Mapping[RelationalAtom, Sequence[Interval]], m: MetricAtom, t) -> bool:
    """Pointwise truth of ground ``m`` at ``t`` over a store of facts."""
    t = Fraction(t)
    return store_model(store, [m], [t]).holds(m, t)


def _grid_for(program: Program, dataset: Dataset, extra: Iterable[Interval], margin: int) -> Grid:
    lo, hi = _endpoint_range(list(f.interval for f in dataset.facts) + list(extra))
    return Grid(lo - margin, hi + margin)


def _apply_head(grid: Grid, head: MetricAtom, body_bits: int) -> Tuple[RelationalAtom, int]:
    """The head atom and the cells it must hold on when ``head`` holds on ``body_bits``."""
    while isinstance(head, (BoxPlus, BoxMinus)):
        body_bits = _shift_cells(grid, head, body_bits)
        head = head.operand
    if not isinstance(head, RelationalAtom):
        raise OracleLimitError(f"oracle cannot apply head {head}")
    return head, body_bits


def _shift_cells(grid: Grid, head: MetricAtom, body_bits: int) -> int:
    w = head.interval
    sign = 1 if isinstance(head, BoxPlus) else -1
    out = 0
    c = 0
    while body_bits >> c:
        if (body_bits >> c) & 1:
            lo, lc, hi, hc = grid.bounds(c)
            if sign > 0:
                iv = (lo + w.lo, lc and w.lo_closed, hi + w.hi, hc and w.hi_closed)
            else:
                iv = (lo - w.hi, lc and w.hi_closed, hi - w.lo, hc and w.lo_closed)
            r = grid.meeting(*iv)
            if r is not None:
                out |= ((1 << (r[1] - r[0] + 1)) - 1) << r[0]
        c += 1
    return out


def oracle_model(program: Program, dataset: Dataset, extra_constants: Sequence[Constant] = (), margin: int = 24,
                 max_margin: int = 192) -> CellModel:
    """Least fixpoint of ``program`` over ``dataset`` on a cell grid.

    The grid is widened until the model is constant near both outer cells;
    if that never happens (e.g. facts keep spreading) ``OracleLimitError``.
    """
    constants = dict.fromkeys(dataset.constants())
    constants.update(dict.fromkeys(program.constants()))
    constants.update(dict.fromkeys(extra_constants))
    if len(constants) > MAX_CONSTANTS:
        raise OracleLimitError(f"oracle handles at most {MAX_CONSTANTS} constants, got {len(constants)}")
    width = 0
    for r in program.rules:
        for m in (r.head, *r.body):
            width = max(width, _probe_margin([m]))
    instances: List[Rule] = [g for r in program.rules for g in ground_instances(r, constants)]
    while True:
        grid = _grid_for(program, dataset, (), margin)
        model = CellModel.from_facts(grid, dataset.facts)
        changed = True
        while changed:
            changed = False
            model._memo.clear()
            updates: Dict[RelationalAtom, int] = {}
            for g in instances:
                acc = grid.full
                for m in g.body:
                    acc &= model.bits(m)
                    if not acc:
                        break
                if acc:
                    a, bits = _apply_head(grid, g.head, acc)
                    updates[a] = updates.get(a, 0) | bits
            for a, bits in updates.items():
                old = model.table.get(a, 0)
                if bits | old != old:
                    model.table[a] = bits | old
                    changed = True
        model._memo.clear()
        if _stable_edges(model, width):
            return model
        if margin >= max_margin:
            raise OracleLimitError("model does not stabilise inside the oracle grid")
        margin *= 2


def _stable_edges(model: CellModel, width: int) -> bool:
    g = model.grid
    span = 2 * width + 2
    if span >= g.size // 2:
        return False
    for bits in model.table.values():
        left = _bit(bits, 0)
        right = _bit(bits, g.size - 1)
        if any(_bit(bits, c) != left for c in range(1, span)):
            return False
        if any(_bit(bits, c) != right for c in range(g.size - span, g.size - 1)):
            return False
    return True


def dense_oracle_entails(program: Program, dataset: Dataset, f: Fact) -> bool:
    model = oracle_model(program, dataset, extra_constants=f.atom.args)
    want = model.grid.cells_of(f.interval)
    return model.table.get(f.atom, 0) & want == want
