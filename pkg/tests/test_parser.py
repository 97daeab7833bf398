import itertools
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tempo.engine import random_instance
from tempo.parser import (
    ParseError,
    parse_dataset,
    parse_fact,
    parse_metric,
    parse_program,
    parse_queries,
    parse_query,
    parse_rule,
    render,
    render_dataset,
    render_fact,
    render_metric,
    render_program,
)
from tempo.syntax import (
    TOP,
    BoxMinus,
    BoxPlus,
    Constant,
    Dataset,
    DiamondMinus,
    DiamondPlus,
    Fact,
    Predicate,
    Program,
    RelationalAtom,
    Rule,
    Since,
    Until,
    Variable,
    atom,
)
from tempo.timeline import NEG_INF, POS_INF, Interval


def test_rule_one():
    r = parse_rule("boxplus[0,2] P(X) :- I(X,Y), P(Y).")
    X, Y = Variable("X"), Variable("Y")
    assert r == Rule(BoxPlus(Interval(0, 2), atom("P", X)), (atom("I", X, Y), atom("P", Y)))


def test_punctual_fact():
    assert parse_fact("P(arthur)@10") == Fact(atom("P", "arthur"), Interval(10, 10))
    assert render_fact(parse_fact("P(arthur)@10")) == "P(arthur)@10"


def test_interval_syntax():
    f = parse_fact("P(a)@(-7/4,+inf)")
    assert f.interval == Interval(Fraction(-7, 4), POS_INF, False, False)
    assert render(Interval.everything()) == "(-inf,+inf)"
    assert parse_fact("P(a)@[1.5,2)").interval == Interval(Fraction(3, 2), 2, True, False)


def test_quoted_constants_and_comments():
    p = parse_program('% a comment\nP("Big Co", X) :- Q(X). % trailing\r\n')
    assert p.rules[0].head_atom.args[0] == Constant("Big Co")
    assert render_program(p) == 'P("Big Co",X) :- Q(X).\n'


@pytest.mark.parametrize(
    "text,where,message",
    [
        ("P(X) :- Q(X,Y,Z) since[1,2] R(Y).\nQ(a) :- R(a).", "2:1", "arity"),
        ("P(X) :- Q(Y).", "1:1", "unsafe"),
        ("P(X) :- boxplus[-1,2] Q(X).", "1:9", "negative"),
        ("m_P(X) :- Q(X).", "1:1", "reserved"),
        ("aux_1(X) :- Q(X).", "1:1", "reserved"),
        ("P(X) :- Q(X) since[1,2] R(X) since[0,1] S(X).", "1:30", "non-associative"),
        ("diamondplus[0,1] P(X) :- Q(X).", "1:1", "heads"),
        ("P(X) :- Q(X)", "1:13", "expected"),
        ("P(X) :- Q(X) & R(X).", "1:14", ""),
    ],
)
def test_program_errors_carry_spans(text, where, message):
    with pytest.raises(ParseError) as e:
        parse_program(text)
    assert str(e.value.span) == where
    assert message in str(e.value)


def test_dataset_and_query_errors():
    with pytest.raises(ParseError, match="arity"):
        parse_dataset("P(a)@[1,2]\nP(a,b)@3")
    with pytest.raises(ParseError, match="empty interval"):
        parse_dataset("P(a)@[2,1]")
    with pytest.raises(ParseError):
        parse_dataset("P(X)@1")  # facts are ground
    with pytest.raises(ParseError):
        parse_query("P(a)")
    assert parse_query("P(X)@[1,2]").atom.args == (Variable("X"),)
    assert len(parse_queries("P(a)@1\nP(X)@2\n")) == 2


def test_reserved_names_allowed_on_request():
    r = parse_rule("m_P_b(X) :- diamondplus[0,2] m_P_b(Y), I(Y,X).", allow_reserved=True)
    assert r.head_atom.predicate.is_magic


def test_magic_names_unique_over_adornments():
    names = set()
    for n in range(5):
        for g in itertools.product("bf", repeat=n):
            names.add(Predicate.magic("P", "".join(g)).name)
    assert len(names) == sum(2 ** n for n in range(5))
    assert Predicate.magic("P", "b").name == "m_P_b"


def test_render_metric_parenthesises_binary():
    m = parse_metric("boxplus[0,1] (P(X) since[0,1] Q(X))")
    assert render_metric(m) == "boxplus[0,1] (P(X) since[0,1] Q(X))"
    assert parse_metric(render_metric(m)) == m
    assert render_metric(parse_metric("(P(X) since[0,1] Q(X))")) == "P(X) since[0,1] Q(X)"


# round trip on generated ASTs

NAMES = st.sampled_from(["a", "b", "c1", "Big Co", "x y", "0", "42"])
VARS = st.sampled_from([Variable("X"), Variable("Y"), Variable("Zed")])
PREDS = [Predicate("P", 1), Predicate("Q", 2), Predicate("N", 0)]


@st.composite
def times(draw):
    n = draw(st.integers(-20, 20))
    d = draw(st.sampled_from([1, 1, 2, 3]))
    return Fraction(n, d)


@st.composite
def intervals(draw, nonneg=False):
    a, b = sorted([draw(times()), draw(times())])
    if nonneg:
        a, b = abs(a), abs(b)
        a, b = min(a, b), max(a, b)
    if draw(st.integers(0, 5)) == 0:
        return Interval(a, POS_INF, draw(st.booleans()), False)
    if not nonneg and draw(st.integers(0, 5)) == 0:
        return Interval(NEG_INF, b, False, draw(st.booleans()))
    if a == b:
        return Interval(a, a)
    return Interval(a, b, draw(st.booleans()), draw(st.booleans()))


@st.composite
def rel_atoms(draw, ground=False):
    p = draw(st.sampled_from(PREDS))
    terms = NAMES.map(Constant) if ground else st.one_of(NAMES.map(Constant), VARS)
    return RelationalAtom(p, tuple(draw(terms) for _ in range(p.arity)))


def metrics(depth=2):
    base = st.one_of(rel_atoms(), st.just(TOP))
    if depth == 0:
        return base
    sub = metrics(depth - 1)
    unary = st.builds(lambda op, w, m: op(w, m), st.sampled_from([BoxPlus, BoxMinus, DiamondPlus, DiamondMinus]),
                      intervals(nonneg=True), sub)
    binary = st.builds(lambda op, l, w, r: op(l, w, r), st.sampled_from([Since, Until]), sub, intervals(nonneg=True), sub)
    return st.one_of(base, unary, binary)


@st.composite
def rules(draw):
    body = tuple(draw(st.lists(metrics(), min_size=1, max_size=3)))
    variables = [v for m in body for v in m.variables()]
    p = draw(st.sampled_from(PREDS))
    args = tuple(draw(st.sampled_from(variables)) if variables and draw(st.booleans()) else Constant("a")
                 for _ in range(p.arity))
    head = RelationalAtom(p, args)
    for _ in range(draw(st.integers(0, 2))):
        head = draw(st.sampled_from([BoxPlus, BoxMinus]))(draw(intervals(nonneg=True)), head)
    return Rule(head, body)


@settings(max_examples=200, deadline=None)
@given(st.lists(rules(), max_size=4))
def test_program_round_trip(rs):
    p = Program(tuple(rs))
    assert parse_program(render_program(p)) == p


@settings(max_examples=200, deadline=None)
@given(st.lists(st.builds(Fact, rel_atoms(ground=True), intervals()), max_size=6))
def test_dataset_round_trip(facts):
    d = Dataset(tuple(facts))
    assert parse_dataset(render_dataset(d)) == d


def test_random_instances_round_trip():
    for seed in range(100):
        p, d, q = random_instance(random.Random(seed))
        assert parse_program(render(p)) == p
        assert parse_dataset(render(d)) == d
        assert parse_query(render(q)) == q
