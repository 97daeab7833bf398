"""Finite interpretations: ground atoms mapped to coalesced interval sets."""

from __future__ import annotations

from typing import Dict, Iterable, Iterator, List, Optional, Tuple

from . import kernels
from .syntax import Dataset, Fact, Predicate, RelationalAtom
from .timeline import Interval, IntervalSet, _wrap


class Interpretation:
    """Mutable store ``atom -> IntervalSet``; absent atoms hold nowhere.

    ``round_tags`` (when tracking is on) records, per atom and added interval,
    the materialisation round that first produced it.  It is diagnostic only.
    """

    def __init__(self, track_rounds: bool = False):
        self.table: Dict[RelationalAtom, IntervalSet] = {}
        self._by_predicate: Dict[Predicate, Dict[RelationalAtom, None]] = {}
        self._by_arg: Dict[Tuple[Predicate, int, object], Dict[RelationalAtom, None]] = {}
        self.round_tags: Optional[Dict[Tuple[RelationalAtom, Interval], int]] = {} if track_rounds else None

    @classmethod
    def least_model_of(cls, dataset: Iterable[Fact], track_rounds: bool = False) -> "Interpretation":
        grouped: Dict[RelationalAtom, List[Interval]] = {}
        for f in dataset:
            grouped.setdefault(f.atom, []).append(f.interval)
        interp = cls(track_rounds)
        for a, ivs in grouped.items():
            interp._set(a, IntervalSet(ivs))
            if interp.round_tags is not None:
                for iv in ivs:
                    interp.round_tags.setdefault((a, iv), 0)
        return interp

    def copy(self) -> "Interpretation":
        other = Interpretation()
        other.table = dict(self.table)
        other._by_predicate = {p: dict(atoms) for p, atoms in self._by_predicate.items()}
        other._by_arg = {k: dict(atoms) for k, atoms in self._by_arg.items()}
        other.round_tags = None if self.round_tags is None else dict(self.round_tags)
        return other

    def _set(self, a: RelationalAtom, s: IntervalSet) -> None:
        if a not in self.table:
            self._by_predicate.setdefault(a.predicate, {})[a] = None
            for i, t in enumerate(a.args):
                self._by_arg.setdefault((a.predicate, i, t), {})[a] = None
        self.table[a] = s

    def get(self, a: RelationalAtom) -> IntervalSet:
        return self.table.get(a, IntervalSet.empty())

    __getitem__ = get

    def atoms_of(self, predicate: Predicate) -> Iterable[RelationalAtom]:
        return self._by_predicate.get(predicate, {}).keys()

    def atoms_with(self, predicate: Predicate, position: int, constant) -> Iterable[RelationalAtom]:
        return self._by_arg.get((predicate, position, constant), {}).keys()

    def predicates(self) -> List[Predicate]:
        return list(self._by_predicate)

    def __iter__(self) -> Iterator[RelationalAtom]:
        return iter(self.table)

    def __len__(self) -> int:
        return len(self.table)

    def items(self):
        return self.table.items()

    def satisfies(self, f: Fact) -> bool:
        s = self.table.get(f.atom)
        return s is not None and s.covers(f.interval)

    def add(self, a: RelationalAtom, iv: Interval, round_no: int = 0) -> bool:
        """Make ``a`` hold on ``iv``; returns whether anything changed."""
        s = self.table.get(a)
        if s is None:
            self._set(a, IntervalSet._canonical((iv,)))
        else:
            if s.covers(iv):
                return False
            self.table[a] = IntervalSet._canonical(kernels.union(s.intervals, (iv,)))
        if self.round_tags is not None:
            self.round_tags.setdefault((a, iv), round_no)
        return True

    def add_fact(self, f: Fact, round_no: int = 0) -> bool:
        return self.add(f.atom, f.interval, round_no)

    def add_set(self, a: RelationalAtom, ivs, round_no: int = 0) -> List[Interval]:
        """Add every interval of ``ivs``; returns the parts that were new."""
        s = self.table.get(a)
        new = [iv for iv in ivs if s is None or not s.covers(iv)]
        if not new:
            return []
        merged = kernels.union(s.intervals if s is not None else (), kernels.coalesce(new))
        self._set(a, IntervalSet._canonical(merged))
        if self.round_tags is not None:
            for iv in new:
                self.round_tags.setdefault((a, _wrap(iv)), round_no)
        return [_wrap(iv) for iv in new]

    def equals(self, other: "Interpretation") -> bool:
        return self.table == other.table

    def __eq__(self, other) -> bool:
        if isinstance(other, Interpretation):
            return self.equals(other)
        return NotImplemented

    __hash__ = None  # mutable

    def contained_in(self, other: "Interpretation") -> bool:
        """True iff ``other`` satisfies every fact this interpretation does."""
        return all(s.issubset(other.get(a)) for a, s in self.table.items())

    def restricted(self, predicates: Iterable[Predicate]) -> "Interpretation":
        keep = set(predicates)
        out = Interpretation()
        for a, s in self.table.items():
            if a.predicate in keep:
                out._set(a, s)
        return out

    def facts(self) -> List[Fact]:
        """All stored facts, sorted by rendered atom then by lower endpoint."""
        from .parser import render_atom

        rows = sorted(((render_atom(a), a) for a in self.table), key=lambda r: r[0])
        return [Fact(a, iv) for _, a in rows for iv in self.table[a]]

    def to_dataset(self) -> Dataset:
        return Dataset(tuple(self.facts()))

    def dump(self) -> str:
        from .parser import render_fact

        return "".join(render_fact(f) + "\n" for f in self.facts())

    def fact_count(self, predicate: Optional[Predicate] = None) -> int:
        """Number of stored maximal intervals, optionally for one predicate."""
        if predicate is None:
            return sum(len(s) for s in self.table.values())
        return sum(len(self.table[a]) for a in self.atoms_of(predicate))

    def __repr__(self) -> str:
        return f"Interpretation({len(self.table)} atoms, {self.fact_count()} intervals)"


def least_model_of(dataset: Iterable[Fact]) -> Interpretation:
    return Interpretation.least_model_of(dataset)


def satisfies_fact(interp: Interpretation, f: Fact) -> bool:
    return interp.satisfies(f)


def add_fact(interp: Interpretation, f: Fact) -> Tuple[Interpretation, bool]:
    """Functional form: returns a new store and whether it differs."""
    out = interp.copy()
    changed = out.add_fact(f)
    return out, changed
