import random
from fractions import Fraction
from pathlib import Path

import pytest

from tempo.engine import RULES, random_instance
from tempo.interpretation import Interpretation
from tempo.materialise import MaterialisationConfig, materialize
from tempo.oracle import Grid, OracleLimitError, dense_oracle_entails, oracle_holds, oracle_model
from tempo.parser import parse_dataset, parse_metric, parse_program
from tempo.syntax import Fact, atom, normalize
from tempo.timeline import Interval

GOLDEN = Path(__file__).parent / "golden"


def test_grid_cells():
    g = Grid(0, 2)
    assert g.size == 7
    assert [g.cell_of(t) for t in (-1, 0, Fraction(1, 2), 1, 2, 3)] == [0, 1, 2, 3, 5, 6]
    assert g.cells_of(Interval(0, 1, False, True)) == 0b1100
    assert g.cells_of(Interval(1, 1)) == 0b1000
    assert g.rep(0) == Fraction(-1, 2) and g.rep(2) == Fraction(1, 2)


@pytest.mark.parametrize("metric, t, expected", [
    ("boxplus[1,2] P(a)", 1, True),
    ("boxplus[1,2] P(a)", 7, False),
    ("diamondminus[0,1] Q(a)", 5, True),
    ("diamondminus[0,1] Q(a)", Fraction(7, 2), False),
    ("P(a) until[1,2] Q(a)", 3, True),
    ("P(a) until[1,2] Q(a)", Fraction(5, 2), True),
    ("P(a) until[1,2] Q(a)", 1, False),
    ("P(a) since[1,2] Q(a)", 6, True),
    ("P(a) since[1,2] Q(a)", 8, False),
])
def test_oracle_holds_examples(metric, t, expected):
    store = {atom("P", "a"): [Interval(0, 8)], atom("Q", "a"): [Interval(4, 5)]}
    assert oracle_holds(store, parse_metric(metric), t) is expected


def test_oracle_model_chain_golden():
    d = parse_dataset((GOLDEN / "chain3.dtf").read_text())
    model = oracle_model(normalize(RULES), d)
    want = parse_dataset((GOLDEN / "chain3_model.dtf").read_text())
    expected = Interpretation.least_model_of(want.facts)
    for a in set(model.table) | set(expected):
        for k in range(-10, 21):
            t = Fraction(k, 2)
            assert model.holds(a, t) == (t in expected.get(a)), (a, t)
    assert dense_oracle_entails(normalize(RULES), d, Fact(atom("P", "u1"), Interval(3, 5)))
    assert not dense_oracle_entails(normalize(RULES), d, Fact(atom("P", "u1"), Interval(3, 6)))


def test_materialise_matches_chain_golden():
    d = parse_dataset((GOLDEN / "chain3.dtf").read_text())
    res = materialize(normalize(RULES), d, MaterialisationConfig())
    assert res.interpretation.dump() == (GOLDEN / "chain3_model.dtf").read_text()


def test_oracle_limits():
    with pytest.raises(OracleLimitError):
        oracle_model(parse_program("P(X) :- diamondminus[0,+inf) P(X)."), parse_dataset("P(a)@0"))
    with pytest.raises(OracleLimitError):
        oracle_model(parse_program("P(X) :- Q(X)."), parse_dataset("Q(a)@1/2"))
    with pytest.raises(OracleLimitError):
        oracle_model(parse_program("P(X) :- Q(X)."), parse_dataset("\n".join(f"Q(c{i})@0" for i in range(7))))


def test_oracle_unbounded_growth_is_exact():
    # the model is P(a)@[0,+inf); the outer cell carries it to infinity
    model = oracle_model(parse_program("boxplus[0,1] P(X) :- P(X)."), parse_dataset("P(a)@0"))
    assert model.holds(atom("P", "a"), 10**6) and not model.holds(atom("P", "a"), Fraction(-1, 2))


@pytest.mark.slow
def test_materialise_agrees_with_oracle(engine_backend):
    checked = 0
    for seed in range(150):
        p, d, _ = random_instance(random.Random(seed))
        p = normalize(p)
        res = materialize(p, d, MaterialisationConfig(max_rounds=200))
        if not res.reached_fixpoint:
            continue
        try:
            model = oracle_model(p, d)
        except OracleLimitError:
            continue
        checked += 1
        interp = res.interpretation
        for a in set(model.table) | set(interp):
            s = interp.get(a)
            for k in range(-10, 51):
                t = Fraction(k, 2)
                assert (t in s) == model.holds(a, t), (seed, a, t)
    assert checked >= 80
