"""End-to-end query answering, benchmark generators and run comparison."""

from __future__ import annotations

import json
import random
import time
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Dict, List, Optional, Sequence, Tuple

from .interpretation import Interpretation
from .magic import rewrite_for_entailment
from .materialise import MaterialisationConfig, MaterialisationResult, materialize
from .parser import parse_program, render_query
from .semantics import _unify
from .syntax import (
    AUX_PREFIX,
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
    Until,
    Variable,
    idb_predicates,
    normalize,
)
from .timeline import Interval, IntervalSet


class Entailment(str, Enum):
    YES = "yes"
    NO = "no"  # certified by a fixpoint
    UNKNOWN = "unknown"  # round cap hit first


@dataclass
class QueryAnswer:
    query: Query
    entailed: Entailment
    substitutions: List[Tuple[Dict[Variable, Constant], IntervalSet]]
    result: MaterialisationResult
    magic: bool
    rewrite_seconds: float = 0.0
    materialise_seconds: float = 0.0

    @property
    def rounds(self) -> int:
        return self.result.rounds

    def answer_facts(self) -> List[Fact]:
        return [Fact(self.query.atom.substitute(s), self.query.interval) for s, _ in self.substitutions]


def is_original(p: Predicate) -> bool:
    return not p.is_magic and not p.name.startswith(AUX_PREFIX)


def _answers(interp: Interpretation, q: Query):
    out = []
    for a in interp.atoms_of(q.atom.predicate):
        sigma = _unify(q.atom, a, {})
        if sigma is None:
            continue
        held = interp.get(a).restrict(q.interval)
        if held.covers(q.interval):
            out.append((dict(sigma), held))
    out.sort(key=lambda item: [c.name for c in item[0].values()])
    return out


def answer_query(
    program: Program,
    dataset: Dataset,
    q: Query,
    config: Optional[MaterialisationConfig] = None,
    magic: bool = True,
) -> QueryAnswer:
    """Answer ``q`` over ``(program, dataset)``.

    With ``magic`` the pair is first rewritten for ``q`` (widened to all of
    time, seed moved into a rule); otherwise the pair is materialised as is.
    Ground queries stop materialisation as soon as the query fact holds.
    """
    config = config or MaterialisationConfig()
    t0 = time.perf_counter()
    p = normalize(program)
    if magic:
        p, d = rewrite_for_entailment(p, dataset, q)
    else:
        d = dataset
    t1 = time.perf_counter()
    goal = Fact(q.atom, q.interval) if q.is_ground else None
    cfg = replace(config, goal=goal)
    res = materialize(p, d, cfg)
    t2 = time.perf_counter()
    subs = _answers(res.interpretation, q)
    if subs:
        verdict = Entailment.YES
    elif res.reached_fixpoint:
        verdict = Entailment.NO
    else:
        verdict = Entailment.UNKNOWN
    return QueryAnswer(q, verdict, subs, res, magic, t1 - t0, t2 - t1)


# benchmarks

RULES = parse_program(
    "boxplus[0,2] P(X) :- I(X,Y), P(Y).\n"
    "boxplus[0,1] P(X) :- I(X,Y), diamondminus[0,1] P(Y).\n"
)

GENERATORS = ("chain", "tree", "random-graph")


@dataclass
class BenchSpec:
    generator: str = "chain"
    users: int = 10
    interaction_span: Interval = field(default_factory=lambda: Interval(0, 20))
    seed: int = 0
    policy: str = "reachable"
    components: int = 1

    def __post_init__(self):
        if self.generator not in GENERATORS:
            raise ValueError(f"unknown generator {self.generator!r}; choose from {', '.join(GENERATORS)}")
        if self.users < 2:
            raise ValueError("a benchmark needs at least 2 users")
        if self.policy not in ("reachable", "unreachable"):
            raise ValueError("policy must be 'reachable' or 'unreachable'")
        if self.components < 1:
            raise ValueError("components must be positive")
        if not self.interaction_span.bounded:
            raise ValueError("interaction span must be bounded")


def _edges(spec: BenchSpec, rng: random.Random, names: List[str]) -> Tuple[List[Tuple[str, str]], List[str]]:
    """Interaction edges ``(x, y)`` (P flows from y to x) and the P sources."""
    n = len(names)
    if spec.generator == "chain":
        return [(names[i], names[i + 1]) for i in range(n - 1)], [names[-1]]
    if spec.generator == "tree":
        edges = [(names[(i - 1) // 2], names[i]) for i in range(1, n)]
        children = {x for x, _ in edges}
        return edges, [u for u in names if u not in children]
    edges = []
    for i in range(1, n):
        edges.append((names[rng.randrange(i)], names[i]))
    for _ in range(n // 2):
        a, b = rng.sample(range(n), 2)
        edges.append((names[a], names[b]))
    return sorted(set(edges), key=lambda e: (names.index(e[0]), names.index(e[1]))), [names[-1]]


def generate_bench(spec: BenchSpec) -> Tuple[Program, Dataset, Query]:
    """Program (the two propagation rules), interaction dataset and query, all seed-determined.

    Interactions are timed while the receiving user already holds the post,
    so P spreads along the component instead of dying after one hop.
    """
    rng = random.Random(spec.seed)
    lo, hi = int(spec.interaction_span.lo), int(spec.interaction_span.hi)
    facts: List[Fact] = []
    per = max(2, spec.users // spec.components)
    heads: List[Tuple[str, Optional[Tuple[int, int]]]] = []
    for c in range(spec.components):
        prefix = chr(ord("a") + c % 26) + (str(c // 26) if c >= 26 else "")
        names = [f"{prefix}{i}" for i in range(per)]
        edges, sources = _edges(spec, rng, names)
        # a lower bound on when each user holds P, as one interval
        window: Dict[str, Tuple[int, int]] = {s: (lo, hi) for s in sources}
        index = {n: i for i, n in enumerate(names)}
        timed = []
        for x, y in sorted(edges, key=lambda e: -index[e[1]]):
            if y in window:
                wlo, whi = window[y]
                start = rng.randint(wlo, min(whi, hi))
            else:
                start = rng.randint(lo, hi)
            end = min(hi, start + rng.randint(1, 3))
            timed.append((x, y, start, end))
            if y in window and x not in window:
                window[x] = (start, min(end, window[y][1]) + 2)
        for x, y, start, end in sorted(timed, key=lambda e: (index[e[0]], index[e[1]])):
            facts.append(Fact(RelationalAtom(Predicate("I", 2), (Constant(x), Constant(y))), Interval(start, end)))
        for s in sources:
            facts.append(Fact(RelationalAtom(Predicate("P", 1), (Constant(s),)), Interval(lo, hi)))
        heads.append((names[0], window.get(names[0])))
    target, held = heads[0]
    if spec.policy == "reachable" and held is not None:
        # inside the head's window or just past it, so both answers occur
        when = rng.randint(held[0], held[1] + 2)
    else:
        when = rng.randint(lo, hi)
    if spec.policy != "reachable":
        target = "isolated"
    q = Query(RelationalAtom(Predicate("P", 1), (Constant(target),)), Interval.point(when))
    return RULES, Dataset(tuple(facts)), q


# reports


def fact_counts(interp: Interpretation) -> Dict[str, int]:
    counts: Dict[str, int] = {}
    for p in interp.predicates():
        counts[p.name] = interp.fact_count(p)
    return counts


def derived_counts(
    interp: Interpretation, program: Program, dataset: Optional[Dataset] = None
) -> Tuple[int, int, Dict[str, int]]:
    """``(original idb facts, magic facts, per-predicate)`` counted as stored maximal intervals.

    A maximal interval already covered by ``dataset`` is input, not derived.
    """
    idb = {p for p in idb_predicates(program)}
    given = Interpretation.least_model_of(dataset.facts if dataset is not None else ())
    original = magic = 0
    per: Dict[str, int] = {}
    for p in interp.predicates():
        if not (p.is_magic or (p in idb and is_original(p))):
            continue
        n = 0
        for a in interp.atoms_of(p):
            known = given.get(a)
            n += sum(1 for iv in interp.get(a) if not known.covers(iv))
        if not n:
            continue
        per[p.name] = n
        if p.is_magic:
            magic += n
        else:
            original += n
    return original, magic, per


def report_row(ans: QueryAnswer, program: Program, dataset: Optional[Dataset] = None) -> dict:
    original, magic, per = derived_counts(ans.result.interpretation, program, dataset)
    return {
        "query": render_query(ans.query),
        "route": "magic" if ans.magic else "baseline",
        "answer": ans.entailed.value,
        "rounds": ans.result.rounds,
        "fixpoint": ans.result.reached_fixpoint,
        "cap_exhausted": ans.entailed is Entailment.UNKNOWN,
        "derived": original,
        "magic_facts": magic,
        "per_predicate": per,
        "rewrite_s": round(ans.rewrite_seconds, 6),
        "materialise_s": round(ans.materialise_seconds, 6),
    }


def compare_runs(
    program: Program, dataset: Dataset, queries: Sequence[Query], config: Optional[MaterialisationConfig] = None
) -> List[dict]:
    """One baseline row and one magic row per query."""
    rows = []
    for q in queries:
        for magic in (False, True):
            rows.append(report_row(answer_query(program, dataset, q, config, magic=magic), program, dataset))
    return rows


def report_jsonl(rows: Sequence[dict]) -> str:
    return "".join(json.dumps(r, sort_keys=True) + "\n" for r in rows)


def report_table(rows: Sequence[dict]) -> str:
    cols = ["query", "route", "answer", "rounds", "derived", "magic_facts", "rewrite_s", "materialise_s"]
    body = [[str(r[c]) + ("*" if c == "answer" and r["cap_exhausted"] else "") for c in cols] for r in rows]
    widths = [max([len(c)] + [len(b[i]) for b in body]) for i, c in enumerate(cols)]
    lines = ["  ".join(c.ljust(w) for c, w in zip(cols, widths))]
    lines += ["  ".join(v.ljust(w) for v, w in zip(b, widths)) for b in body]
    if any(r["cap_exhausted"] for r in rows):
        lines.append("* round cap hit before a fixpoint; answer unknown")
    return "\n".join(lines) + "\n"


# random instances for property suites

_VARS = [Variable("X"), Variable("Y"), Variable("Z")]
_EDB = [Predicate("I", 2), Predicate("E", 1)]
_IDB = [Predicate("P", 1), Predicate("R", 2), Predicate("S", 1)]


def _window(rng: random.Random, max_hi: int = 3, positive: bool = False) -> Interval:
    a = rng.randint(0, max_hi)
    b = rng.randint(a, max_hi)
    if positive and b == 0:
        b = 1
    if a == b:
        return Interval(a, a)
    return Interval(a, b, rng.random() < 0.7, rng.random() < 0.7)


def _random_atom(rng: random.Random, preds: Sequence[Predicate], constants: Sequence[Constant]) -> RelationalAtom:
    p = rng.choice(preds)
    args = tuple(rng.choice(constants) if rng.random() < 0.15 else rng.choice(_VARS) for _ in range(p.arity))
    return RelationalAtom(p, args)


def _random_body_atom(rng: random.Random, preds, constants) -> MetricAtom:
    base = _random_atom(rng, preds, constants)
    k = rng.random()
    if k < 0.35:
        return base
    if k < 0.8:
        op = rng.choice([BoxPlus, BoxMinus, DiamondPlus, DiamondMinus])
        return op(_window(rng), base)
    op = rng.choice([Since, Until])
    return op(_random_atom(rng, preds, constants), _window(rng), base)


def random_instance(
    rng: random.Random, max_rules: int = 5, max_constants: int = 6, horizon: int = 10
) -> Tuple[Program, Dataset, Query]:
    """A small random bounded instance (flat bodies, box heads, integer endpoints)."""
    n_const = rng.randint(2, max_constants)
    constants = [Constant(c) for c in "abcdef"[:n_const]]
    preds = _EDB + _IDB
    rules: List[Rule] = []
    n_rules = rng.randint(1, max_rules)
    while len(rules) < n_rules:
        body = tuple(_random_body_atom(rng, preds, constants) for _ in range(rng.randint(1, 3)))
        body_vars = [v for m in body for v in m.variables()]
        hp = rng.choice(_IDB)
        args = tuple(rng.choice(body_vars) if body_vars and rng.random() < 0.9 else rng.choice(constants)
                     for _ in range(hp.arity))
        head = rng.choice([BoxPlus, BoxMinus])(_window(rng), RelationalAtom(hp, args))
        rules.append(Rule(head, body))
    facts = []
    for _ in range(rng.randint(2, 10)):
        p = rng.choice(preds)
        a = RelationalAtom(p, tuple(rng.choice(constants) for _ in range(p.arity)))
        lo = rng.randint(0, horizon)
        hi = rng.randint(lo, horizon)
        iv = Interval(lo, hi) if lo == hi else Interval(lo, hi, rng.random() < 0.7, rng.random() < 0.7)
        facts.append(Fact(a, iv))
    qp = rng.choice(_IDB)
    qargs = tuple(rng.choice(constants) if rng.random() < 0.6 else _VARS[i] for i in range(qp.arity))
    q = Query(RelationalAtom(qp, qargs), Interval.point(rng.randint(0, horizon)))
    return Program(tuple(rules)), Dataset(tuple(facts)), q
