"""Evaluation of ground metric atoms and matching of rule bodies.

``eval_metric`` returns the exact set of time points where a ground metric
atom holds in an interpretation, computed on interval representations.
"""

from __future__ import annotations

from typing import Dict, Iterable, Iterator, List, Optional, Sequence, Tuple

from . import kernels
from .interpretation import Interpretation
from .syntax import (
    BoxMinus,
    BoxPlus,
    Constant,
    DiamondMinus,
    DiamondPlus,
    Falsehood,
    MetricAtom,
    RelationalAtom,
    Since,
    Truth,
    Until,
    Variable,
    _Binary,
    _Unary,
)
from .timeline import Interval, IntervalSet

EVERYTHING = IntervalSet._canonical((Interval.everything(),))

Substitution = Dict[Variable, Constant]


def _eval(interp: Interpretation, m: MetricAtom) -> Sequence:
    if isinstance(m, RelationalAtom):
        s = interp.table.get(m)
        return s.intervals if s is not None else ()
    if isinstance(m, Truth):
        return EVERYTHING.intervals
    if isinstance(m, Falsehood):
        return ()
    if isinstance(m, _Unary):
        inner = _eval(interp, m.operand)
        if not inner:
            return ()
        if isinstance(m, BoxPlus):
            return kernels.erode_future(inner, m.interval)
        if isinstance(m, BoxMinus):
            return kernels.erode_past(inner, m.interval)
        if isinstance(m, DiamondPlus):
            return kernels.dilate_sub(inner, m.interval)
        if isinstance(m, DiamondMinus):
            return kernels.dilate_add(inner, m.interval)
    if isinstance(m, _Binary):
        right = _eval(interp, m.right)
        if not right:
            return ()
        left = _eval(interp, m.left)
        if isinstance(m, Until):
            return kernels.until(right, left, m.interval)
        if isinstance(m, Since):
            return kernels.since(right, left, m.interval)
    raise TypeError(f"cannot evaluate {m!r}")


def eval_metric(interp: Interpretation, m: MetricAtom) -> IntervalSet:
    """The set of time points where ground ``m`` holds in ``interp``."""
    if not m.is_ground:
        raise ValueError(f"metric atom {m} is not ground")
    return IntervalSet._canonical(_eval(interp, m))


def eval_body(interp: Interpretation, body: Sequence[MetricAtom], sigma: Optional[Substitution] = None) -> IntervalSet:
    """Intersection over the body atoms of where each (instantiated) atom holds."""
    acc: Optional[Sequence] = None
    for m in body:
        g = m.substitute(sigma) if sigma else m
        if not g.is_ground:
            raise ValueError(f"substitution does not ground {m}")
        cur = _eval(interp, g)
        acc = cur if acc is None else kernels.intersect(acc, cur)
        if not acc:
            return IntervalSet.empty()
    return IntervalSet._canonical(acc or ())


eval_body_at_time = eval_body


# matching


def _required(m: MetricAtom, out: List[RelationalAtom], optional: List[RelationalAtom]) -> None:
    """Split the relational leaves of ``m`` by whether ``m`` can hold when the leaf holds nowhere."""
    if isinstance(m, RelationalAtom):
        out.append(m)
    elif isinstance(m, _Unary):
        _required(m.operand, out, optional)
    elif isinstance(m, _Binary):
        _required(m.right, out, optional)
        # the left operand is vacuous when the right one may hold at t itself
        w = m.interval
        if w.lo == 0 and w.lo_closed:
            optional.extend(m.left.atoms())
        else:
            _required(m.left, out, optional)


def body_leaves(body: Sequence[MetricAtom]) -> Tuple[List[RelationalAtom], List[RelationalAtom]]:
    """``(required, optional)`` relational leaves of ``body`` in reasoning order."""
    required: List[RelationalAtom] = []
    optional: List[RelationalAtom] = []
    for m in body:
        _required(m, required, optional)
    return required, optional


def _unify(pattern: RelationalAtom, ground: RelationalAtom, sigma: Substitution) -> Optional[Substitution]:
    out = None
    for p, g in zip(pattern.args, ground.args):
        if isinstance(p, Variable):
            bound = sigma.get(p) if out is None else out.get(p)
            if bound is None:
                if out is None:
                    out = dict(sigma)
                out[p] = g
            elif bound != g:
                return None
        elif p != g:
            return None
    return sigma if out is None else out


def _candidates(interp: Interpretation, pattern: RelationalAtom, sigma: Substitution) -> Iterable[RelationalAtom]:
    best = None
    for i, t in enumerate(pattern.args):
        c = sigma.get(t) if isinstance(t, Variable) else t
        if c is not None:
            found = interp.atoms_with(pattern.predicate, i, c)
            if best is None or len(found) < len(best):
                best = found
                if not best:
                    break
    return interp.atoms_of(pattern.predicate) if best is None else best


def _join(interp: Interpretation, patterns: Sequence[RelationalAtom], sigma: Substitution) -> Iterator[Substitution]:
    if not patterns:
        yield sigma
        return
    first, rest = patterns[0], patterns[1:]
    for g in list(_candidates(interp, first, sigma)):
        s = _unify(first, g, sigma)
        if s is not None:
            yield from _join(interp, rest, s)


def _extend(variables: Sequence[Variable], domain: Sequence[Constant], sigma: Substitution) -> Iterator[Substitution]:
    missing = [v for v in variables if v not in sigma]
    if not missing:
        yield sigma
        return
    v, more = missing[0], missing[1:]
    for c in domain:
        s = dict(sigma)
        s[v] = c
        yield from _extend(more, domain, s)


def default_domain(interp: Interpretation, body: Sequence[MetricAtom]) -> List[Constant]:
    seen: Dict[Constant, None] = {}
    for a in interp:
        for t in a.args:
            seen.setdefault(t, None)
    for m in body:
        for a in m.atoms():
            for t in a.args:
                if isinstance(t, Constant):
                    seen.setdefault(t, None)
    return sorted(seen, key=lambda c: c.name)


def candidate_substitutions(
    interp: Interpretation,
    body: Sequence[MetricAtom],
    domain: Sequence[Constant],
    seed: Optional[Tuple[RelationalAtom, RelationalAtom]] = None,
) -> Iterator[Substitution]:
    """Substitutions that match every required leaf against stored atoms.

    Variables that occur only in optional leaves range over ``domain``.  With
    ``seed=(leaf, ground)`` the join starts from unifying ``leaf`` with ``ground``.
    """
    required, _ = body_leaves(body)
    variables: Dict[Variable, None] = {}
    for m in body:
        for v in m.variables():
            variables.setdefault(v, None)
    sigma: Substitution = {}
    patterns = required
    if seed is not None:
        leaf, ground = seed
        s = _unify(leaf, ground, sigma)
        if s is None:
            return
        sigma = s
        patterns = [p for p in required if p is not leaf]
    for s in _join(interp, patterns, sigma):
        yield from _extend(list(variables), domain, s)


def match_substitutions(
    interp: Interpretation, body: Sequence[MetricAtom], domain: Optional[Sequence[Constant]] = None
) -> List[Substitution]:
    """Every substitution for the body variables under which the body holds somewhere."""
    if domain is None:
        domain = default_domain(interp, body)
    out: List[Substitution] = []
    seen = set()
    for s in candidate_substitutions(interp, body, domain):
        key = tuple(sorted((v.name, c.name) for v, c in s.items()))
        if key in seen:
            continue
        seen.add(key)
        if eval_body(interp, body, s):
            out.append(s)
    return out
