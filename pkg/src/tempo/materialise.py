"""Immediate consequence operator, fixpoint materialisation and the unbounded-fact swap."""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Set, Tuple

from . import kernels
from .interpretation import Interpretation
from .semantics import _eval, body_leaves, candidate_substitutions
from .syntax import (
    TOP,
    BoxPlus,
    Constant,
    Dataset,
    Fact,
    Predicate,
    Program,
    RelationalAtom,
    Rule,
    is_normal_head,
)
from .timeline import Interval

DEFAULT_MAX_ROUNDS = 1000


def default_max_rounds() -> int:
    value = os.environ.get("TEMPO_MAX_ROUNDS")
    if value:
        try:
            n = int(value)
        except ValueError:
            raise ValueError(f"TEMPO_MAX_ROUNDS must be a positive integer, got {value!r}") from None
        if n >= 1:
            return n
        raise ValueError(f"TEMPO_MAX_ROUNDS must be a positive integer, got {value!r}")
    return DEFAULT_MAX_ROUNDS


@dataclass
class MaterialisationConfig:
    max_rounds: int = field(default_factory=default_max_rounds)
    goal: Optional[Fact] = None
    collect_stats: bool = False
    naive: bool = False
    keep_history: bool = False
    track_rounds: bool = False
    # widen a magic fact to (-inf,+inf) once it has grown in this many rounds
    widen_guards: Optional[int] = None

    def __post_init__(self):
        if self.max_rounds < 1:
            raise ValueError("max_rounds must be at least 1")
        if self.widen_guards is not None and self.widen_guards < 1:
            raise ValueError("widen_guards must be at least 1")


@dataclass
class PredicateStats:
    derived: int = 0
    first_round: Optional[int] = None
    last_round: Optional[int] = None

    def record(self, n: int, round_no: int) -> None:
        self.derived += n
        if self.first_round is None:
            self.first_round = round_no
        self.last_round = round_no


@dataclass
class MaterialisationResult:
    """Outcome of a materialisation run.

    A goal reported as entailed is always entailed.  When ``reached_fixpoint``
    is true the store is closed under the program, so a goal it does not
    satisfy is certainly not entailed; otherwise the answer is unknown.
    """

    interpretation: Interpretation
    rounds: int
    reached_fixpoint: bool
    goal_entailed: Optional[bool] = None
    stats: Dict[Predicate, PredicateStats] = field(default_factory=dict)
    history: Optional[List[Interpretation]] = None
    widened: List[RelationalAtom] = field(default_factory=list)


def _check_program(program: Program) -> None:
    for r in program.rules:
        if not is_normal_head(r.head):
            raise ValueError(f"rule head must be boxplus/boxminus over a relational atom: {r}")


def _domain(program: Program, interp: Interpretation, extra: Sequence[Constant] = ()) -> List[Constant]:
    seen: Dict[Constant, None] = {}
    for a in interp:
        for t in a.args:
            seen.setdefault(t, None)
    for c in program.constants():
        seen.setdefault(c, None)
    for c in extra:
        seen.setdefault(c, None)
    return sorted(seen, key=lambda c: c.name)


def _sigma_key(sigma) -> Tuple:
    return tuple(sorted((v.name, c.name) for v, c in sigma.items()))


def _fire(
    rule: Rule, interp: Interpretation, sigmas, out: Dict[RelationalAtom, list]
) -> None:
    head = rule.head
    window = head.interval
    shift = kernels.iv_add if isinstance(head, BoxPlus) else kernels.iv_sub
    seen = set()
    for sigma in sigmas:
        key = _sigma_key(sigma)
        if key in seen:
            continue
        seen.add(key)
        acc = None
        for m in rule.body:
            cur = _eval(interp, m.substitute(sigma) if sigma else m)
            acc = cur if acc is None else kernels.intersect(acc, cur)
            if not acc:
                break
        if not acc:
            continue
        target = head.operand.substitute(sigma) if sigma else head.operand
        bucket = out.setdefault(target, [])
        bucket.extend(shift(iv, window) for iv in acc)


def _apply(
    program: Program,
    interp: Interpretation,
    domain: Sequence[Constant],
    delta: Optional[Set[RelationalAtom]],
) -> Dict[RelationalAtom, list]:
    """Head facts produced by one application of the program to frozen ``interp``.

    With ``delta`` given, only substitutions touching an atom in ``delta`` are tried.
    """
    out: Dict[RelationalAtom, list] = {}
    by_pred: Dict[Predicate, List[RelationalAtom]] = {}
    if delta is not None:
        for a in delta:
            by_pred.setdefault(a.predicate, []).append(a)
    for rule in program.rules:
        if delta is None:
            sigmas = candidate_substitutions(interp, rule.body, domain)
        else:
            required, optional = body_leaves(rule.body)
            sigmas = (
                s
                for leaf in required + optional
                for g in by_pred.get(leaf.predicate, ())
                for s in candidate_substitutions(interp, rule.body, domain, seed=(leaf, g))
            )
        _fire(rule, interp, sigmas, out)
    return out


def _merge(interp: Interpretation, derived: Dict[RelationalAtom, list], round_no: int, stats) -> Set[RelationalAtom]:
    changed: Set[RelationalAtom] = set()
    # sorted insertion keeps results independent of rule iteration order
    for a in sorted(derived, key=lambda x: (x.predicate.name, tuple(t.name for t in x.args))):
        new = interp.add_set(a, kernels.coalesce(derived[a]), round_no)
        if new:
            changed.add(a)
            if stats is not None:
                stats.setdefault(a.predicate, PredicateStats()).record(len(new), round_no)
    return changed


def immediate_consequence(program: Program, interp: Interpretation) -> Interpretation:
    """The least interpretation containing ``interp`` and closed under one rule application."""
    _check_program(program)
    out = interp.copy()
    _merge(out, _apply(program, interp, _domain(program, interp), None), 0, None)
    return out


def materialize(program: Program, dataset: Dataset, config: Optional[MaterialisationConfig] = None) -> MaterialisationResult:
    """Iterate the immediate consequence operator from the least model of ``dataset``.

    Stops at the first of: fixpoint, goal satisfied, or ``max_rounds`` applications.
    """
    config = config or MaterialisationConfig()
    _check_program(program)
    interp = Interpretation.least_model_of(dataset, track_rounds=config.track_rounds)
    goal = config.goal
    extra = list(goal.atom.args) if goal is not None else []
    domain = _domain(program, interp, extra)
    stats: Optional[Dict[Predicate, PredicateStats]] = {} if config.collect_stats else None
    history = [interp.copy()] if config.keep_history else None

    growth: Dict[RelationalAtom, int] = {}
    widened: List[RelationalAtom] = []

    def result(rounds, fixpoint, entailed):
        return MaterialisationResult(interp, rounds, fixpoint, entailed, stats or {}, history, widened)

    if goal is not None and interp.satisfies(goal):
        return result(0, False, True)
    delta: Optional[Set[RelationalAtom]] = None
    for round_no in range(1, config.max_rounds + 1):
        derived = _apply(program, interp, domain, None if config.naive else delta)
        # derivations are computed against the frozen previous store, then merged
        delta = _merge(interp, derived, round_no, stats)
        if config.widen_guards is not None:
            _widen(interp, delta, growth, config.widen_guards, round_no, widened)
        if history is not None:
            history.append(interp.copy())
        if not delta:
            return result(round_no, True, None if goal is None else interp.satisfies(goal))
        if goal is not None and interp.satisfies(goal):
            return result(round_no, False, True)
    return result(config.max_rounds, False, None)


def _widen(interp, delta, growth, limit, round_no, widened) -> None:
    """Replace repeatedly growing magic facts by their limit over-approximation.

    Magic atoms only ever act as guards in rule bodies, so enlarging them keeps
    every derived original fact entailed and cannot lose answers; it only
    weakens pruning.
    """
    everything = Interval.everything()
    for a in delta:
        if not a.predicate.is_magic:
            continue
        growth[a] = growth.get(a, 0) + 1
        if growth[a] == limit and interp.add(a, everything, round_no):
            widened.append(a)


# unbounded facts as rules


def to_rule(f: Fact) -> Rule:
    """``R(t)@(-inf,+inf)`` becomes the rule ``R(t) :- top``."""
    if f.interval != Interval.everything():
        raise ValueError(f"only facts over (-inf,+inf) can become rules, got {f}")
    return Rule(BoxPlus(Interval(0, 0), f.atom), (TOP,))


def unbounded(dataset: Dataset) -> List[Fact]:
    return [f for f in dataset.facts if f.interval == Interval.everything()]


def swap(dataset: Dataset) -> Program:
    return Program(tuple(to_rule(f) for f in unbounded(dataset)))


def swap_apply(program: Program, dataset: Dataset) -> Tuple[Program, Dataset]:
    """Move every ``(-inf,+inf)`` fact of ``dataset`` into ``program`` as a rule."""
    moved = set(unbounded(dataset))
    return program.union(swap(dataset).rules), Dataset(tuple(f for f in dataset.facts if f not in moved))
