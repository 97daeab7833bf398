"""Text <-> AST for programs (``.dmtl``), datasets (``.dtf``) and queries (``.q``).

Surface syntax::

    boxplus[0,2] P(X) :- I(X,Y), P(Y).       % rule
    Q(X) :- A(X) since[1,2] diamondminus(0,1] B(X).
    P(arthur)@10                             % fact, punctual shorthand
    I(arthur,beatrice)@[8,9)

Variables start with an uppercase letter or ``_``; constants are lowercase
identifiers, unsigned integers or double-quoted strings.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import List, MutableMapping, Optional, Tuple, Union

from .syntax import (
    AUX_PREFIX,
    MAGIC_PREFIX,
    BoxMinus,
    BoxPlus,
    Constant,
    Dataset,
    DiamondMinus,
    DiamondPlus,
    Fact,
    Falsehood,
    MetricAtom,
    Predicate,
    Program,
    Query,
    RelationalAtom,
    Rule,
    Since,
    Truth,
    Until,
    Variable,
    _Binary,
    _Unary,
)
from .timeline import Interval, format_time, parse_time

UNARY_KEYWORDS = {
    "boxplus": BoxPlus,
    "boxminus": BoxMinus,
    "diamondplus": DiamondPlus,
    "diamondminus": DiamondMinus,
}
BINARY_KEYWORDS = {"since": Since, "until": Until}
KEYWORDS = set(UNARY_KEYWORDS) | set(BINARY_KEYWORDS) | {"top", "bot"}
_OP_NAMES = {cls: name for name, cls in {**UNARY_KEYWORDS, **BINARY_KEYWORDS}.items()}


@dataclass(frozen=True)
class SourceSpan:
    line: int
    column: int
    start: int
    end: int

    def __str__(self) -> str:
        return f"{self.line}:{self.column}"


class ParseError(ValueError):
    def __init__(self, message: str, span: SourceSpan):
        super().__init__(f"{span}: {message}")
        self.message = message
        self.span = span


_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r\n]+|%[^\n]*)
  | (?P<number>[+-]?(?:inf\b|\d+(?:/\d+|\.\d+)?))
  | (?P<string>"(?:[^"\\\n]|\\.)*")
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<arrow>:-)
  | (?P<punct>[()\[\],.@])
    """,
    re.VERBOSE,
)


@dataclass
class Token:
    kind: str
    text: str
    pos: int
    end: int


class _Source:
    def __init__(self, text: str):
        self.text = text

    def span(self, start: int, end: int) -> SourceSpan:
        line = self.text.count("\n", 0, start) + 1
        column = start - (self.text.rfind("\n", 0, start) + 1) + 1
        return SourceSpan(
            line, column, len(self.text[:start].encode("utf-8")), len(self.text[:end].encode("utf-8"))
        )


def _tokenize(src: _Source) -> List[Token]:
    text = src.text
    tokens: List[Token] = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", src.span(pos, pos + 1))
        kind = m.lastgroup
        if kind != "ws":
            tokens.append(Token(kind, m.group(), pos, m.end()))
        pos = m.end()
    tokens.append(Token("eof", "", len(text), len(text)))
    return tokens


Arities = MutableMapping[str, Tuple[int, SourceSpan]]


class _Parser:
    def __init__(self, text: str, arities: Optional[Arities], allow_reserved: bool):
        self.src = _Source(text)
        self.tokens = _tokenize(self.src)
        self.i = 0
        self.arities: Arities = {} if arities is None else arities
        self.allow_reserved = allow_reserved

    # token helpers
    @property
    def tok(self) -> Token:
        return self.tokens[self.i]

    def error(self, message: str, tok: Optional[Token] = None) -> ParseError:
        tok = tok or self.tok
        return ParseError(message, self.src.span(tok.pos, max(tok.end, tok.pos + 1)))

    def at(self, text: str) -> bool:
        return self.tok.text == text and self.tok.kind in ("punct", "arrow", "ident")

    def advance(self) -> Token:
        tok = self.tok
        self.i += 1
        return tok

    def expect(self, text: str) -> Token:
        if not self.at(text):
            got = self.tok.text or "end of input"
            raise self.error(f"expected {text!r}, got {got!r}")
        return self.advance()

    # grammar
    def time(self):
        tok = self.tok
        if tok.kind != "number":
            raise self.error(f"expected a time point, got {tok.text or 'end of input'!r}")
        self.advance()
        try:
            return parse_time(tok.text)
        except ValueError as exc:
            raise self.error(str(exc), tok) from None

    def interval(self) -> Interval:
        start = self.tok
        if self.at("[") or self.at("("):
            lo_closed = self.advance().text == "["
            lo = self.time()
            self.expect(",")
            hi = self.time()
            if not (self.at("]") or self.at(")")):
                raise self.error("expected ']' or ')' to close interval")
            hi_closed = self.advance().text == "]"
            try:
                return Interval(lo, hi, lo_closed, hi_closed)
            except ValueError as exc:
                raise ParseError(f"malformed interval: {exc}", self.src.span(start.pos, self.tokens[self.i - 1].end))
        try:
            return Interval.point(self.time())
        except ValueError as exc:
            raise self.error(f"malformed interval: {exc}", start) from None

    def term(self):
        tok = self.tok
        if tok.kind == "ident":
            self.advance()
            if tok.text[0].isupper() or tok.text[0] == "_":
                return Variable(tok.text)
            return Constant(tok.text)
        if tok.kind == "string":
            self.advance()
            return Constant(_unquote(tok.text))
        if tok.kind == "number" and tok.text.isdigit():
            self.advance()
            return Constant(tok.text)
        raise self.error(f"expected a term, got {tok.text or 'end of input'!r}")

    def relational(self) -> RelationalAtom:
        tok = self.tok
        if tok.kind != "ident" or tok.text in KEYWORDS:
            raise self.error(f"expected an atom, got {tok.text or 'end of input'!r}")
        self.advance()
        name = tok.text
        if not self.allow_reserved and (name.startswith(MAGIC_PREFIX) or name.startswith(AUX_PREFIX)):
            raise self.error(f"predicate name {name!r} uses a reserved prefix", tok)
        args = []
        if self.at("("):
            self.advance()
            if not self.at(")"):
                args.append(self.term())
                while self.at(","):
                    self.advance()
                    args.append(self.term())
            self.expect(")")
        span = self.src.span(tok.pos, self.tokens[self.i - 1].end)
        known = self.arities.get(name)
        if known is None:
            self.arities[name] = (len(args), span)
        elif known[0] != len(args):
            raise ParseError(
                f"predicate {name} used with arity {len(args)} here but arity {known[0]} at {known[1]}", span
            )
        return RelationalAtom(Predicate(name, len(args)), tuple(args))

    def unary(self) -> MetricAtom:
        tok = self.tok
        if tok.kind == "ident" and tok.text in UNARY_KEYWORDS:
            self.advance()
            window = self.interval()
            if window.lo < 0:
                raise ParseError(
                    f"operator interval {window} mentions negative time points",
                    self.src.span(tok.pos, self.tokens[self.i - 1].end),
                )
            return UNARY_KEYWORDS[tok.text](window, self.unary())
        if tok.kind == "ident" and tok.text == "top":
            self.advance()
            return Truth()
        if tok.kind == "ident" and tok.text == "bot":
            self.advance()
            return Falsehood()
        if self.at("("):
            self.advance()
            inner = self.metric()
            self.expect(")")
            return inner
        return self.relational()

    def metric(self) -> MetricAtom:
        left = self.unary()
        tok = self.tok
        if tok.kind == "ident" and tok.text in BINARY_KEYWORDS:
            self.advance()
            window = self.interval()
            if window.lo < 0:
                raise ParseError(
                    f"operator interval {window} mentions negative time points",
                    self.src.span(tok.pos, self.tokens[self.i - 1].end),
                )
            right = self.unary()
            if self.tok.kind == "ident" and self.tok.text in BINARY_KEYWORDS:
                raise self.error("since/until are non-associative; add parentheses")
            return BINARY_KEYWORDS[tok.text](left, window, right)
        return left

    def rule(self) -> Rule:
        start = self.tok
        head = self.metric()
        self.expect(":-")
        body = [self.metric()]
        while self.at(","):
            self.advance()
            body.append(self.metric())
        end = self.expect(".")
        try:
            return Rule(head, tuple(body))
        except ValueError as exc:
            raise ParseError(str(exc), self.src.span(start.pos, end.end)) from None

    def fact_like(self, ground: bool):
        start = self.tok
        a = self.relational()
        self.expect("@")
        iv = self.interval()
        if self.at("."):
            self.advance()
        if ground:
            if not a.is_ground:
                raise ParseError(f"fact {a} is not ground", self.src.span(start.pos, self.tokens[self.i - 1].end))
            return Fact(a, iv)
        return Query(a, iv)

    def many(self, item) -> list:
        out = []
        while self.tok.kind != "eof":
            out.append(item())
        return out


def _unquote(text: str) -> str:
    return re.sub(r"\\(.)", r"\1", text[1:-1])


def parse_program(text: str, *, arities: Optional[Arities] = None, allow_reserved: bool = False) -> Program:
    p = _Parser(text, arities, allow_reserved)
    return Program(tuple(p.many(p.rule)))


def parse_dataset(text: str, *, arities: Optional[Arities] = None, allow_reserved: bool = False) -> Dataset:
    p = _Parser(text, arities, allow_reserved)
    return Dataset(tuple(p.many(lambda: p.fact_like(True))))


def parse_fact(text: str, *, allow_reserved: bool = False) -> Fact:
    facts = parse_dataset(text, allow_reserved=allow_reserved).facts
    if len(facts) != 1:
        raise ParseError(f"expected exactly one fact, got {len(facts)}", SourceSpan(1, 1, 0, len(text.encode())))
    return facts[0]


def parse_queries(text: str, *, arities: Optional[Arities] = None, allow_reserved: bool = False) -> List[Query]:
    p = _Parser(text, arities, allow_reserved)
    return p.many(lambda: p.fact_like(False))


def parse_query(text: str, *, arities: Optional[Arities] = None, allow_reserved: bool = False) -> Query:
    queries = parse_queries(text, arities=arities, allow_reserved=allow_reserved)
    if len(queries) != 1:
        raise ParseError(f"expected exactly one query, got {len(queries)}", SourceSpan(1, 1, 0, len(text.encode())))
    return queries[0]


def parse_metric(text: str, *, allow_reserved: bool = False) -> MetricAtom:
    p = _Parser(text, None, allow_reserved)
    m = p.metric()
    if p.tok.kind != "eof":
        raise p.error(f"unexpected {p.tok.text!r}")
    return m


def parse_rule(text: str, *, allow_reserved: bool = False) -> Rule:
    rules = parse_program(text, allow_reserved=allow_reserved).rules
    if len(rules) != 1:
        raise ParseError(f"expected exactly one rule, got {len(rules)}", SourceSpan(1, 1, 0, len(text.encode())))
    return rules[0]


# rendering

_BARE_CONSTANT = re.compile(r"^(?:[a-z][A-Za-z0-9_]*|\d+)$")


def render_term(t) -> str:
    if isinstance(t, Variable):
        return t.name
    if _BARE_CONSTANT.match(t.name):
        return t.name
    return '"' + t.name.replace("\\", "\\\\").replace('"', '\\"') + '"'


def render_interval(iv: Interval) -> str:
    return str(iv)


def render_atom(a: RelationalAtom) -> str:
    if not a.args:
        return a.predicate.name
    return f"{a.predicate.name}({','.join(render_term(t) for t in a.args)})"


def _operand(m: MetricAtom) -> str:
    text = render_metric(m)
    return f"({text})" if isinstance(m, _Binary) else text


def render_metric(m: MetricAtom) -> str:
    if isinstance(m, Truth):
        return "top"
    if isinstance(m, Falsehood):
        return "bot"
    if isinstance(m, RelationalAtom):
        return render_atom(m)
    if isinstance(m, _Unary):
        return f"{_OP_NAMES[type(m)]}{m.interval} {_operand(m.operand)}"
    if isinstance(m, _Binary):
        return f"{_operand(m.left)} {_OP_NAMES[type(m)]}{m.interval} {_operand(m.right)}"
    render = getattr(m, "render", None)
    if render is not None:
        return render()
    raise TypeError(f"cannot render {m!r}")


def render_rule(r: Rule) -> str:
    return f"{render_metric(r.head)} :- {', '.join(render_metric(m) for m in r.body)}."


def render_program(p: Program) -> str:
    return "".join(render_rule(r) + "\n" for r in p.rules)


def _at(iv: Interval) -> str:
    return format_time(iv.lo) if iv.punctual else str(iv)


def render_fact(f: Union[Fact, Query]) -> str:
    return f"{render_atom(f.atom)}@{_at(f.interval)}"


render_query = render_fact


def render_dataset(d: Dataset) -> str:
    return "".join(render_fact(f) + "\n" for f in d.facts)


def render(x) -> str:
    """Render a program, dataset, query, fact, rule, metric atom or interval."""
    if isinstance(x, Program):
        return render_program(x)
    if isinstance(x, Dataset):
        return render_dataset(x)
    if isinstance(x, (Fact, Query)):
        return render_fact(x)
    if isinstance(x, Rule):
        return render_rule(x)
    if isinstance(x, MetricAtom):
        return render_metric(x)
    if isinstance(x, Interval):
        return render_interval(x)
    raise TypeError(f"cannot render {x!r}")
