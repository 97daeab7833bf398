import random

from hypothesis import given
from hypothesis import strategies as st

from tempo.interpretation import Interpretation, add_fact, least_model_of, satisfies_fact
from tempo.parser import parse_dataset, parse_fact
from tempo.syntax import Dataset, Fact, atom
from tempo.timeline import Interval, IntervalSet


def store(text):
    return least_model_of(parse_dataset(text))


def iset(*texts):
    return IntervalSet([Interval.parse(t) for t in texts])


def test_least_model_examples():
    assert store("P(a)@[1,2]\nP(a)@(2,3]").get(atom("P", "a")) == iset("[1,3]")
    assert len(least_model_of(Dataset(()))) == 0
    assert store("P(a)@[1,2)\nP(a)@(2,3]").get(atom("P", "a")) == iset("[1,2)", "(2,3]")
    assert store("P(a)@1").get(atom("P", "b")) == IntervalSet.empty()


def test_satisfies_examples():
    assert satisfies_fact(store("P(a)@[1,3]"), parse_fact("P(a)@[2,3]"))
    assert not satisfies_fact(store("P(a)@[1,2)\nP(a)@(2,3]"), parse_fact("P(a)@[1,3]"))
    assert not satisfies_fact(Interpretation(), parse_fact("P(a)@5"))


def test_add_fact_examples():
    i, changed = add_fact(store("P(a)@[1,2]"), parse_fact("P(a)@(2,3]"))
    assert changed and i.get(atom("P", "a")) == iset("[1,3]")
    j, changed = add_fact(store("P(a)@[1,3]"), parse_fact("P(a)@[1,2]"))
    assert not changed and j == store("P(a)@[1,3]")
    k, changed = add_fact(Interpretation(), parse_fact("Q(b)@0"))
    assert changed and k.get(atom("Q", "b")) == iset("[0,0]")


def test_add_fact_is_functional():
    base = store("P(a)@1")
    add_fact(base, parse_fact("P(a)@2"))
    assert base == store("P(a)@1")


def test_equality_and_containment():
    assert store("P(a)@[1,2]\nP(a)@[2,3]") == store("P(a)@[1,3]")
    assert Interpretation().contained_in(store("P(a)@1"))
    closed, half = store("P(a)@[1,2]"), store("P(a)@[1,2)")
    assert half.contained_in(closed) and not closed.contained_in(half)


def test_dump_is_sorted_and_reloadable():
    i = store("Q(b)@[3,4]\nP(a)@(5,6]\nP(a)@1\n")
    text = i.dump()
    assert text == "P(a)@1\nP(a)@(5,6]\nQ(b)@[3,4]\n"
    assert least_model_of(parse_dataset(text)) == i


def test_argument_index():
    i = store("I(a,b)@1\nI(a,c)@1\nI(c,a)@1")
    from tempo.syntax import Constant, Predicate

    assert len(list(i.atoms_with(Predicate("I", 2), 0, Constant("a")))) == 2
    assert len(list(i.atoms_with(Predicate("I", 2), 1, Constant("a")))) == 1


def test_round_tags():
    i = Interpretation(track_rounds=True)
    i.add(atom("P", "a"), Interval(0, 1), 3)
    assert i.round_tags[(atom("P", "a"), Interval(0, 1))] == 3


facts = st.builds(
    lambda p, c, a, b: Fact(atom(p, c), Interval(min(a, b), max(a, b))),
    st.sampled_from("PQ"), st.sampled_from("ab"), st.integers(0, 6), st.integers(0, 6),
)


@given(st.lists(facts, max_size=8))
def test_add_monotone_idempotent_commutative(fs):
    forward, backward = Interpretation(), Interpretation()
    for f in fs:
        before = forward.copy()
        forward.add_fact(f)
        assert before.contained_in(forward)
        assert not forward.copy().add_fact(f)
    for f in reversed(fs):
        backward.add_fact(f)
    assert forward == backward == least_model_of(fs)
    for f in fs:
        assert forward.satisfies(f)


def test_least_model_is_least():
    # every store satisfying the facts contains the least model
    rng = random.Random(3)
    for _ in range(50):
        fs = [Fact(atom("P", "a"), Interval(x, x + rng.randint(0, 2))) for x in rng.sample(range(10), 3)]
        least = least_model_of(fs)
        bigger = least.copy()
        bigger.add(atom("P", "a"), Interval(rng.randint(0, 5), 12))
        assert least.contained_in(bigger)
        for f in fs:
            assert least.satisfies(f)
