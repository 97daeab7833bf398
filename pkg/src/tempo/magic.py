"""Magic-set rewriting for DatalogMTL.

``magic_rewrite`` turns a program, dataset and query into a goal-directed
pair whose materialisation derives only query-relevant facts (and the times
at which they are relevant) while preserving the answers to the query.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, List, Sequence, Set, Tuple

from .materialise import swap_apply
from .syntax import (
    BoxMinus,
    BoxPlus,
    Constant,
    Dataset,
    DiamondMinus,
    DiamondPlus,
    Fact,
    MetricAtom,
    Predicate,
    Program,
    Query,
    RelationalAtom,
    Rule,
    Since,
    Term,
    Variable,
    _Binary,
    _Unary,
    idb_predicates,
    is_normalized,
)
from .timeline import POS_INF, Interval

ZERO = Interval(0, 0)


class ConfigurationError(ValueError):
    """The input violates a precondition of the rewriting (e.g. unbounded intervals)."""


def query_adornment(q) -> str:
    a = q.atom if isinstance(q, (Query, Fact)) else q
    return "".join("b" if isinstance(t, Constant) else "f" for t in a.args)


def _check_lengths(terms: Sequence[Term], adornment: str) -> None:
    if len(terms) != len(adornment):
        raise ValueError(f"adornment {adornment!r} does not fit {len(terms)} terms")


def bt(terms: Sequence[Term], adornment: str) -> Tuple[Term, ...]:
    """Terms at bound positions."""
    _check_lengths(terms, adornment)
    return tuple(t for t, g in zip(terms, adornment) if g == "b")


def bv(terms: Sequence[Term], adornment: str) -> Tuple[Variable, ...]:
    """Variables at bound positions."""
    return tuple(t for t in bt(terms, adornment) if isinstance(t, Variable))


def magic_atom(a: RelationalAtom, adornment: str) -> RelationalAtom:
    # the magic predicate has one argument per bound position, so it takes
    # every bound term (constants included), not only the bound variables
    return RelationalAtom(Predicate.magic(a.predicate.name, adornment), bt(a.args, adornment))


@dataclass(frozen=True, repr=False)
class AdornedAtom(MetricAtom):
    """A relational atom whose predicate carries a b/f adornment."""

    atom: RelationalAtom
    adornment: str

    def __post_init__(self):
        _check_lengths(self.atom.args, self.adornment)

    @property
    def predicate(self) -> Predicate:
        return self.atom.predicate

    @property
    def args(self):
        return self.atom.args

    def atoms(self):
        yield self.atom

    def leaves(self):
        yield self

    def map_leaves(self, fn):
        return fn(self)

    def render(self) -> str:
        from .parser import render_term

        inner = f"({','.join(render_term(t) for t in self.atom.args)})" if self.atom.args else ""
        return f"{self.atom.predicate.name}^{self.adornment}{inner}"

    def __repr__(self) -> str:
        return f"AdornedAtom({self.render()})"


@dataclass(frozen=True)
class AdornedRule:
    rule: Rule

    @property
    def head(self) -> MetricAtom:
        return self.rule.head

    @property
    def body(self) -> Tuple[MetricAtom, ...]:
        return self.rule.body

    @property
    def head_atom(self) -> AdornedAtom:
        return next(self.rule.head.leaves())

    def __str__(self) -> str:
        return str(self.rule)


def _adorn_leaves(m: MetricAtom, bound: Set[Variable], idb: Set[Predicate], found: List[Tuple[Predicate, str]]) -> MetricAtom:
    """Adorn relational leaves of ``m`` in reasoning order, updating ``bound``."""
    if isinstance(m, RelationalAtom):
        g = "".join("b" if isinstance(t, Constant) or t in bound else "f" for t in m.args)
        bound.update(t for t in m.args if isinstance(t, Variable))
        if m.predicate in idb:
            found.append((m.predicate, g))
        return AdornedAtom(m, g)
    if isinstance(m, _Unary):
        return type(m)(m.interval, _adorn_leaves(m.operand, bound, idb, found))
    if isinstance(m, _Binary):
        right = _adorn_leaves(m.right, bound, idb, found)
        left = _adorn_leaves(m.left, bound, idb, found)
        return type(m)(left, m.interval, right)
    return m


def adorn_rule(rule: Rule, adornment: str, idb: Set[Predicate]) -> Tuple[AdornedRule, List[Tuple[Predicate, str]]]:
    """Adorn ``rule`` for a head adorned with ``adornment``.

    Returns the adorned rule and the adorned idb predicates of its body.
    """
    head_atom = rule.head_atom
    bound = {t for t, g in zip(head_atom.args, adornment) if g == "b" and isinstance(t, Variable)}
    head = rule.head.map_leaves(lambda a: AdornedAtom(a, adornment))
    found: List[Tuple[Predicate, str]] = []
    body = tuple(_adorn_leaves(m, bound, idb, found) for m in rule.body)
    return AdornedRule(Rule(head, body)), found


def adorn_program(program: Program, q: Query) -> List[AdornedRule]:
    """Worklist adornment starting from the query predicate (FIFO, each ``R^g`` once)."""
    idb = set(idb_predicates(program))
    start = (q.atom.predicate, query_adornment(q))
    todo = deque([start])
    seen = {start}
    out: List[AdornedRule] = []
    while todo:
        pred, g = todo.popleft()
        for rule in program.rules:
            head_atom = rule.head_atom
            if head_atom is None or head_atom.predicate != pred:
                continue
            adorned, found = adorn_rule(rule, g, idb)
            out.append(adorned)
            for item in found:
                if item not in seen:
                    seen.add(item)
                    todo.append(item)
    return out


def _contains_magic(m: MetricAtom) -> bool:
    return any(a.predicate.is_magic for a in m.atoms())


def _to_magic(idb: Set[Predicate]):
    def fn(leaf):
        if isinstance(leaf, AdornedAtom) and leaf.predicate in idb:
            return magic_atom(leaf.atom, leaf.adornment)
        return leaf

    return fn


def _right_endpoint(m: _Binary):
    if m.interval.hi == POS_INF:
        raise ConfigurationError(f"cannot build magic rules for {m}: its interval has no finite right endpoint")
    return m.interval.hi


def magic_head_atoms(m: MetricAtom, idb: Iterable[Predicate]) -> List[MetricAtom]:
    """Head atoms over magic predicates for a body atom ``m`` with adorned idb atoms.

    A bare relational atom counts as ``boxplus[0,0]`` of itself.
    """
    idb = set(idb)
    mp = m.map_leaves(_to_magic(idb))
    if isinstance(mp, RelationalAtom):
        return [BoxPlus(ZERO, mp)] if mp.predicate.is_magic else []
    if isinstance(mp, (BoxPlus, BoxMinus)):
        return [mp]
    if isinstance(mp, DiamondPlus):
        return [BoxPlus(mp.interval, mp.operand)]
    if isinstance(mp, DiamondMinus):
        return [BoxMinus(mp.interval, mp.operand)]
    if isinstance(mp, _Binary):
        box = BoxMinus if isinstance(mp, Since) else BoxPlus
        out: List[MetricAtom] = []
        if _contains_magic(mp.left):
            out.append(box(Interval(0, _right_endpoint(mp)), mp.left))
        if _contains_magic(mp.right):
            out.append(box(mp.interval, mp.right))
        return out
    return []


def _strip(m: MetricAtom) -> MetricAtom:
    return m.map_leaves(lambda leaf: leaf.atom if isinstance(leaf, AdornedAtom) else leaf)


def _strip_rule(r: Rule) -> Rule:
    return Rule(_strip(r.head), tuple(_strip(m) for m in r.body))


def _anchor(m: _Binary) -> MetricAtom:
    """A body atom witnessing the right operand of ``m`` at a time compatible with ``m``."""
    op = DiamondMinus if isinstance(m, Since) else DiamondPlus
    return op(m.interval, _strip(m.right))


@dataclass
class RewriteOutput:
    program: Program
    seed_fact: Fact
    dataset: Dataset
    adorned_program: List[AdornedRule]
    rules_type1: List[Rule] = field(default_factory=list)
    rules_type2: List[Rule] = field(default_factory=list)


def magic_rewrite(program: Program, dataset: Dataset, q: Query) -> RewriteOutput:
    """Rewrite ``(program, dataset)`` for query ``q``; ``program`` must be normalized."""
    if not is_normalized(program):
        raise ConfigurationError("magic rewriting needs a normalized program")
    idb = set(idb_predicates(program))
    g0 = query_adornment(q)
    seed = Fact(magic_atom(q.atom, g0), q.interval)
    adorned = adorn_program(program, q)

    type1: List[Rule] = []
    for ra in adorned:
        head = ra.head
        h = ra.head_atom
        op = DiamondPlus if isinstance(head, BoxPlus) else DiamondMinus
        prefix = op(head.interval, magic_atom(h.atom, h.adornment))
        type1.append(Rule(head, (prefix,) + ra.body))

    type2: List[Rule] = []
    for r in type1:
        for j, m in enumerate(r.body):
            if j == 0 or not any(isinstance(x, AdornedAtom) and x.predicate in idb for x in m.leaves()):
                continue
            left = tuple(_strip(x) for x in r.body[:j])
            available = {v for x in left for v in x.variables()}
            for head in magic_head_atoms(m, idb):
                body = left
                if isinstance(m, _Binary) and not set(head.variables()) <= available:
                    # bindings flowed from the right operand into the left one
                    body = left + (_anchor(m),)
                type2.append(Rule(head, body))

    t1 = [_strip_rule(r) for r in type1]
    t2 = list(dict.fromkeys(_strip_rule(r) for r in type2))
    return RewriteOutput(
        program=Program(tuple(t1 + t2)),
        seed_fact=seed,
        dataset=dataset.union((seed,)),
        adorned_program=adorned,
        rules_type1=t1,
        rules_type2=t2,
    )


@dataclass
class EntailmentRewrite:
    program: Program
    dataset: Dataset
    rewrite: RewriteOutput

    def __iter__(self):
        return iter((self.program, self.dataset))


def rewrite_for_entailment(program: Program, dataset: Dataset, q: Query) -> EntailmentRewrite:
    """Rewrite for the query widened to ``(-inf,+inf)`` and turn the seed into a ``:- top`` rule.

    The result is bounded whenever the inputs are, so materialising it does not
    depend on the unbounded seed.
    """
    if not program.bounded:
        raise ConfigurationError("entailment rewriting needs a bounded program")
    if not dataset.bounded:
        raise ConfigurationError("entailment rewriting needs a bounded dataset")
    out = magic_rewrite(program, dataset, Query(q.atom, Interval.everything()))
    p, d = swap_apply(out.program, out.dataset)
    return EntailmentRewrite(p, d, out)
