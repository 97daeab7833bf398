"""Abstract syntax of DatalogMTL programs, datasets and queries."""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from typing import Dict, Iterable, Iterator, List, Mapping, Optional, Sequence, Tuple, Union

from .timeline import Interval

MAGIC_PREFIX = "m_"
AUX_PREFIX = "aux_"
ZERO = Interval(0, 0)


@dataclass(frozen=True)
class Variable:
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class Constant:
    name: str

    def __str__(self) -> str:
        from .parser import render_term

        return render_term(self)


Term = Union[Variable, Constant]
Substitution = Dict[Variable, Constant]


def is_adornment(text: str) -> bool:
    return all(c in "bf" for c in text)


def magic_name(base: str, adornment: str) -> str:
    return f"{MAGIC_PREFIX}{base}_{adornment}"


@dataclass(frozen=True)
class Predicate:
    name: str
    arity: int

    @property
    def magic_of(self) -> Optional[Tuple[str, str]]:
        """``(base predicate, adornment)`` for magic predicates, else ``None``."""
        if not self.name.startswith(MAGIC_PREFIX):
            return None
        base, sep, adornment = self.name[len(MAGIC_PREFIX):].rpartition("_")
        if not sep or not base or not is_adornment(adornment):
            return None
        return base, adornment

    @property
    def is_magic(self) -> bool:
        return self.magic_of is not None

    @classmethod
    def magic(cls, base: str, adornment: str) -> "Predicate":
        return cls(magic_name(base, adornment), adornment.count("b"))

    def __str__(self) -> str:
        return f"{self.name}/{self.arity}"


class MetricAtom:
    """Base class of the metric-atom grammar."""

    __slots__ = ()

    def atoms(self) -> Iterator["RelationalAtom"]:
        """Relational atoms in reasoning order (right operand of U/S first)."""
        return iter(())

    def leaves(self) -> Iterator["MetricAtom"]:
        """Relational-atom-like leaves (relational or adorned atoms), reasoning order."""
        return iter(())

    def variables(self) -> List[Variable]:
        seen: Dict[Variable, None] = {}
        for a in self.atoms():
            for t in a.args:
                if isinstance(t, Variable):
                    seen.setdefault(t, None)
        return list(seen)

    def map_leaves(self, fn) -> "MetricAtom":
        return self

    def substitute(self, sigma: Mapping[Variable, Constant]) -> "MetricAtom":
        return self.map_leaves(lambda a: a.substitute(sigma))

    @property
    def depth(self) -> int:
        return 0

    @property
    def is_ground(self) -> bool:
        return not self.variables()

    def __str__(self) -> str:
        from .parser import render_metric

        return render_metric(self)


@dataclass(frozen=True, repr=False)
class Truth(MetricAtom):
    def __repr__(self) -> str:
        return "Truth()"


@dataclass(frozen=True, repr=False)
class Falsehood(MetricAtom):
    def __repr__(self) -> str:
        return "Falsehood()"


TOP = Truth()
BOTTOM = Falsehood()


@dataclass(frozen=True, repr=False)
class RelationalAtom(MetricAtom):
    predicate: Predicate
    args: Tuple[Term, ...] = ()
    _hash: int = field(default=0, init=False, compare=False, repr=False)

    def __post_init__(self):
        if not isinstance(self.args, tuple):
            object.__setattr__(self, "args", tuple(self.args))
        if len(self.args) != self.predicate.arity:
            raise ValueError(f"{self.predicate.name} expects {self.predicate.arity} arguments, got {len(self.args)}")
        object.__setattr__(self, "_hash", hash((self.predicate, self.args)))

    def __hash__(self) -> int:
        return self._hash

    def atoms(self):
        yield self

    def leaves(self):
        yield self

    def map_leaves(self, fn):
        return fn(self)

    def substitute(self, sigma):
        if not any(isinstance(t, Variable) for t in self.args):
            return self
        return RelationalAtom(self.predicate, tuple(sigma.get(t, t) if isinstance(t, Variable) else t for t in self.args))

    @property
    def is_ground(self) -> bool:
        return not any(isinstance(t, Variable) for t in self.args)

    def __repr__(self) -> str:
        return f"RelationalAtom({self})"


def atom(name: str, *args: Union[Term, str]) -> RelationalAtom:
    """Convenience constructor: uppercase strings become variables, others constants."""
    terms = []
    for a in args:
        if isinstance(a, str):
            a = Variable(a) if a[:1].isupper() or a[:1] == "_" else Constant(a)
        terms.append(a)
    return RelationalAtom(Predicate(name, len(terms)), tuple(terms))


def _check_window(interval: Interval) -> None:
    if interval.lo < 0:
        raise ValueError(f"operator interval {interval} mentions negative time points")


@dataclass(frozen=True, repr=False)
class _Unary(MetricAtom):
    interval: Interval
    operand: MetricAtom

    def __post_init__(self):
        _check_window(self.interval)

    def atoms(self):
        return self.operand.atoms()

    def leaves(self):
        return self.operand.leaves()

    def map_leaves(self, fn):
        return type(self)(self.interval, self.operand.map_leaves(fn))

    @property
    def depth(self) -> int:
        return 1 + self.operand.depth

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.interval}, {self.operand!r})"


class BoxPlus(_Unary):
    pass


class BoxMinus(_Unary):
    pass


class DiamondPlus(_Unary):
    pass


class DiamondMinus(_Unary):
    pass


@dataclass(frozen=True, repr=False)
class _Binary(MetricAtom):
    left: MetricAtom
    interval: Interval
    right: MetricAtom

    def __post_init__(self):
        _check_window(self.interval)

    def atoms(self):
        yield from self.right.atoms()
        yield from self.left.atoms()

    def leaves(self):
        yield from self.right.leaves()
        yield from self.left.leaves()

    def map_leaves(self, fn):
        return type(self)(self.left.map_leaves(fn), self.interval, self.right.map_leaves(fn))

    @property
    def depth(self) -> int:
        return 1 + max(self.left.depth, self.right.depth)

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.left!r}, {self.interval}, {self.right!r})"


class Until(_Binary):
    pass


class Since(_Binary):
    pass


UNARY_OPERATORS = (BoxPlus, BoxMinus, DiamondPlus, DiamondMinus)
BINARY_OPERATORS = (Until, Since)


def _operators(m: MetricAtom) -> Iterator[MetricAtom]:
    yield m
    if isinstance(m, _Unary):
        yield from _operators(m.operand)
    elif isinstance(m, _Binary):
        yield from _operators(m.left)
        yield from _operators(m.right)


def head_problem(head: MetricAtom) -> Optional[str]:
    for m in _operators(head):
        if isinstance(m, Falsehood):
            return "rule heads cannot mention bottom"
        if isinstance(m, (DiamondPlus, DiamondMinus, Until, Since)):
            return "rule heads may only use boxplus/boxminus"
    return None


@dataclass(frozen=True, repr=False)
class Rule:
    head: MetricAtom
    body: Tuple[MetricAtom, ...]

    def __post_init__(self):
        if not isinstance(self.body, tuple):
            object.__setattr__(self, "body", tuple(self.body))
        if not self.body:
            raise ValueError("rule body must not be empty")
        problem = head_problem(self.head)
        if problem:
            raise ValueError(problem)
        body_vars = {v for m in self.body for v in m.variables()}
        unsafe = [v.name for v in self.head.variables() if v not in body_vars]
        if unsafe:
            raise ValueError(f"unsafe rule: head variable(s) {', '.join(unsafe)} missing from body")

    @property
    def head_atom(self) -> Optional[RelationalAtom]:
        return next(self.head.atoms(), None)

    def variables(self) -> List[Variable]:
        seen: Dict[Variable, None] = {}
        for m in (self.head, *self.body):
            for v in m.variables():
                seen.setdefault(v, None)
        return list(seen)

    def substitute(self, sigma) -> "Rule":
        return Rule(self.head.substitute(sigma), tuple(m.substitute(sigma) for m in self.body))

    def map_leaves(self, fn) -> "Rule":
        return Rule(self.head.map_leaves(fn), tuple(m.map_leaves(fn) for m in self.body))

    def __str__(self) -> str:
        from .parser import render_rule

        return render_rule(self)

    def __repr__(self) -> str:
        return f"Rule({self})"


@dataclass(frozen=True, repr=False)
class Program:
    rules: Tuple[Rule, ...] = ()

    def __post_init__(self):
        # a program is a set; keep first-occurrence order for determinism
        object.__setattr__(self, "rules", tuple(dict.fromkeys(self.rules)))

    def __iter__(self) -> Iterator[Rule]:
        return iter(self.rules)

    def __len__(self) -> int:
        return len(self.rules)

    def union(self, other: Iterable[Rule]) -> "Program":
        return Program(self.rules + tuple(other))

    def predicates(self) -> List[Predicate]:
        seen: Dict[Predicate, None] = {}
        for r in self.rules:
            for m in (r.head, *r.body):
                for a in m.atoms():
                    seen.setdefault(a.predicate, None)
        return list(seen)

    def constants(self) -> List[Constant]:
        seen: Dict[Constant, None] = {}
        for r in self.rules:
            for m in (r.head, *r.body):
                for a in m.atoms():
                    for t in a.args:
                        if isinstance(t, Constant):
                            seen.setdefault(t, None)
        return list(seen)

    @property
    def bounded(self) -> bool:
        return all(iv.bounded for r in self.rules for m in (r.head, *r.body) for iv in _windows(m))

    def __str__(self) -> str:
        from .parser import render_program

        return render_program(self)

    def __repr__(self) -> str:
        return f"Program({len(self.rules)} rules)"


def _windows(m: MetricAtom) -> Iterator[Interval]:
    for op in _operators(m):
        if isinstance(op, (_Unary, _Binary)):
            yield op.interval


@dataclass(frozen=True, repr=False)
class Fact:
    atom: RelationalAtom
    interval: Interval

    def __post_init__(self):
        if not self.atom.is_ground:
            raise ValueError(f"fact {self.atom} is not ground")

    def __str__(self) -> str:
        from .parser import render_fact

        return render_fact(self)

    def __repr__(self) -> str:
        return f"Fact({self})"


@dataclass(frozen=True, repr=False)
class Dataset:
    facts: Tuple[Fact, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "facts", tuple(dict.fromkeys(self.facts)))

    def __iter__(self) -> Iterator[Fact]:
        return iter(self.facts)

    def __len__(self) -> int:
        return len(self.facts)

    def union(self, other: Iterable[Fact]) -> "Dataset":
        return Dataset(self.facts + tuple(other))

    def constants(self) -> List[Constant]:
        seen: Dict[Constant, None] = {}
        for f in self.facts:
            for t in f.atom.args:
                seen.setdefault(t, None)
        return list(seen)

    @property
    def bounded(self) -> bool:
        return all(f.interval.bounded for f in self.facts)

    def __str__(self) -> str:
        from .parser import render_dataset

        return render_dataset(self)

    def __repr__(self) -> str:
        return f"Dataset({len(self.facts)} facts)"


@dataclass(frozen=True, repr=False)
class Query:
    atom: RelationalAtom
    interval: Interval

    @property
    def is_ground(self) -> bool:
        return self.atom.is_ground

    def constants(self) -> List[Constant]:
        return [t for t in self.atom.args if isinstance(t, Constant)]

    def __str__(self) -> str:
        from .parser import render_query

        return render_query(self)

    def __repr__(self) -> str:
        return f"Query({self})"


def idb_predicates(program: Program) -> List[Predicate]:
    seen: Dict[Predicate, None] = {}
    for r in program.rules:
        a = r.head_atom
        if a is not None:
            seen.setdefault(a.predicate, None)
    return list(seen)


def edb_predicates(program: Program) -> List[Predicate]:
    idb = set(idb_predicates(program))
    return [p for p in program.predicates() if p not in idb]


def ground_instances(rule: Rule, constants: Iterable[Constant]) -> List[Rule]:
    variables = sorted(rule.variables(), key=lambda v: v.name)
    pool = sorted(set(constants), key=lambda c: c.name)
    return [rule.substitute(dict(zip(variables, combo))) for combo in itertools.product(pool, repeat=len(variables))]


def is_flat_body_atom(m: MetricAtom) -> bool:
    if isinstance(m, _Unary):
        return m.operand.depth == 0
    if isinstance(m, _Binary):
        return m.left.depth == 0 and m.right.depth == 0
    return True


def is_normal_head(head: MetricAtom) -> bool:
    return isinstance(head, (BoxPlus, BoxMinus)) and isinstance(head.operand, RelationalAtom)


def is_normalized(program: Program) -> bool:
    return all(is_normal_head(r.head) and all(is_flat_body_atom(m) for m in r.body) for r in program.rules)


_AUX_RE = re.compile(r"^aux_(\d+)$")


class _Normalizer:
    def __init__(self, program: Program):
        used = [int(m.group(1)) for p in program.predicates() for m in [_AUX_RE.match(p.name)] if m]
        self.counter = max(used, default=0)
        self.cache: Dict[MetricAtom, RelationalAtom] = {}
        self.out: List[Rule] = []

    def aux_for(self, sub: MetricAtom, make_rule) -> RelationalAtom:
        key = (sub, make_rule.__name__)
        cached = self.cache.get(key)
        if cached is not None:
            return cached
        self.counter += 1
        variables = sub.variables()
        aux = RelationalAtom(Predicate(f"{AUX_PREFIX}{self.counter}", len(variables)), tuple(variables))
        self.cache[key] = aux
        make_rule(sub, aux)
        return aux

    def body_definition(self, sub: MetricAtom, aux: RelationalAtom) -> None:
        self.emit(BoxPlus(ZERO, aux), (sub,))

    def head_definition(self, sub: MetricAtom, aux: RelationalAtom) -> None:
        self.emit(sub, (aux,))

    def operand(self, m: MetricAtom) -> MetricAtom:
        if m.depth == 0:
            return m
        return self.aux_for(m, self.body_definition)

    def body_atom(self, m: MetricAtom) -> MetricAtom:
        if isinstance(m, _Unary):
            return type(m)(m.interval, self.operand(m.operand))
        if isinstance(m, _Binary):
            return type(m)(self.operand(m.left), m.interval, self.operand(m.right))
        return m

    def head(self, h: MetricAtom) -> Optional[MetricAtom]:
        if isinstance(h, RelationalAtom):
            return BoxPlus(ZERO, h)
        if isinstance(h, Truth):
            return None
        if isinstance(h.operand, RelationalAtom):
            return h
        if any(isinstance(x, Truth) for x in _operators(h.operand)):
            return None
        return type(h)(h.interval, self.aux_for(h.operand, self.head_definition))

    def emit(self, head: MetricAtom, body: Sequence[MetricAtom]) -> None:
        new_head = self.head(head)
        if new_head is None:
            return
        self.out.append(Rule(new_head, tuple(self.body_atom(m) for m in body)))


def normalize(program: Program) -> Program:
    """Flatten nested operators and give every head the form ``boxplus/boxminus[w] R(t)``.

    Each replaced subformula gets a fresh ``aux_<n>`` predicate over the
    subformula's variables; identical subformulas share one auxiliary predicate.
    """
    n = _Normalizer(program)
    for r in program.rules:
        n.emit(r.head, r.body)
    return Program(tuple(n.out))


def strip_zero_windows(m: MetricAtom) -> MetricAtom:
    """Drop ``[0,0]`` box/diamond wrappers, which are identities."""
    if isinstance(m, _Unary):
        inner = strip_zero_windows(m.operand)
        if m.interval == ZERO:
            return inner
        return type(m)(m.interval, inner)
    if isinstance(m, _Binary):
        return type(m)(strip_zero_windows(m.left), m.interval, strip_zero_windows(m.right))
    return m


def strip_rule_zero_windows(rule: Rule) -> Rule:
    return Rule(strip_zero_windows(rule.head), tuple(strip_zero_windows(m) for m in rule.body))
