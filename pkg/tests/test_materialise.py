import random

import pytest

from tempo.engine import random_instance
from tempo.interpretation import least_model_of
from tempo.magic import magic_rewrite
from tempo.materialise import (
    MaterialisationConfig,
    default_max_rounds,
    immediate_consequence,
    materialize,
    swap,
    swap_apply,
    to_rule,
    unbounded,
)
from tempo.parser import parse_dataset, parse_fact, parse_program, render_program
from tempo.syntax import Dataset, Fact, Program, Query, normalize
from tempo.timeline import Interval

RULE_1 = "boxplus[0,2] P(X) :- I(X,Y), P(Y)."


def test_one_application_of_rule_one():
    p = parse_program(RULE_1)
    d = parse_dataset("I(a,b)@8\nP(b)@8")
    out = immediate_consequence(normalize(p), least_model_of(d))
    assert out.dump() == "I(a,b)@8\nP(a)@[8,10]\nP(b)@8\n"


def test_fixpoint_is_stable():
    p = normalize(parse_program(RULE_1))
    res = materialize(p, parse_dataset("I(a,b)@8\nI(b,c)@9\nP(c)@9"))
    assert res.reached_fixpoint
    assert immediate_consequence(p, res.interpretation) == res.interpretation


def test_unsatisfied_bodies_change_nothing():
    p = normalize(parse_program(RULE_1))
    i = least_model_of(parse_dataset("I(a,b)@8\nP(c)@8"))
    assert immediate_consequence(p, i) == i


def test_running_example_rewritten_pair(example_program, example_dataset, example_query):
    out = magic_rewrite(normalize(example_program), example_dataset, example_query)
    full = materialize(out.program, out.dataset)
    assert full.reached_fixpoint and full.rounds == 2
    assert full.interpretation.satisfies(Fact(example_query.atom, example_query.interval))
    assert full.interpretation.dump() == (
        "I(arthur,beatrice)@8\nP(arthur)@[8,10]\nP(beatrice)@8\nm_P_b(arthur)@10\nm_P_b(beatrice)@8\n"
    )
    goal = materialize(out.program, out.dataset, MaterialisationConfig(goal=Fact(example_query.atom, example_query.interval)))
    assert goal.goal_entailed is True and goal.rounds == 1 and not goal.reached_fixpoint


def test_round_cap_without_fixpoint():
    res = materialize(normalize(parse_program("boxplus[0,2] P(X) :- P(X).")), parse_dataset("P(a)@0"),
                      MaterialisationConfig(max_rounds=5))
    assert not res.reached_fixpoint and res.rounds == 5 and res.goal_entailed is None
    assert res.interpretation.dump() == "P(a)@[0,10]\n"


def test_empty_program():
    d = parse_dataset("P(a)@[1,2]")
    res = materialize(Program(()), d)
    assert res.reached_fixpoint and res.rounds == 1 and res.interpretation == least_model_of(d)


def test_goal_already_in_dataset():
    d = parse_dataset("P(a)@[1,2]")
    res = materialize(Program(()), d, MaterialisationConfig(goal=parse_fact("P(a)@1")))
    assert res.rounds == 0 and res.goal_entailed


def test_goal_refuted_at_fixpoint():
    res = materialize(normalize(parse_program(RULE_1)), parse_dataset("I(a,b)@8\nP(b)@8"),
                      MaterialisationConfig(goal=parse_fact("P(a)@11")))
    assert res.reached_fixpoint and res.goal_entailed is False


def test_stats_and_round_tags():
    p = normalize(parse_program(RULE_1))
    d = parse_dataset("I(a,b)@8\nI(b,c)@8\nP(c)@8")
    res = materialize(p, d, MaterialisationConfig(collect_stats=True, track_rounds=True))
    (pred, st), = res.stats.items()
    assert pred.name == "P" and st.derived == 2 and (st.first_round, st.last_round) == (1, 2)
    assert set(res.interpretation.round_tags.values()) == {0, 1, 2}


def test_non_normalized_rejected():
    with pytest.raises(ValueError):
        materialize(parse_program("P(X) :- boxplus[0,1] diamondplus[0,1] Q(X)."), Dataset(()))


def test_config_validation(monkeypatch):
    with pytest.raises(ValueError):
        MaterialisationConfig(max_rounds=0)
    monkeypatch.setenv("TEMPO_MAX_ROUNDS", "7")
    assert default_max_rounds() == 7 and MaterialisationConfig().max_rounds == 7
    monkeypatch.setenv("TEMPO_MAX_ROUNDS", "zero")
    with pytest.raises(ValueError):
        default_max_rounds()
    monkeypatch.delenv("TEMPO_MAX_ROUNDS")
    assert default_max_rounds() == 1000


def _instances(n, offset=0, **kw):
    for seed in range(offset, offset + n):
        p, d, q = random_instance(random.Random(seed), **kw)
        yield seed, normalize(p), d, q


def test_naive_equals_semi_naive():
    compared = 0
    for seed, p, d, _ in _instances(80):
        semi = materialize(p, d, MaterialisationConfig(max_rounds=60, keep_history=True))
        naive = materialize(p, d, MaterialisationConfig(max_rounds=60, naive=True, keep_history=True))
        assert semi.rounds == naive.rounds and semi.reached_fixpoint == naive.reached_fixpoint
        assert semi.history == naive.history, seed
        compared += 1
    assert compared == 80


def test_determinism_under_rule_and_fact_order():
    for seed, p, d, _ in _instances(50, offset=300):
        rng = random.Random(seed)
        rules, facts = list(p.rules), list(d.facts)
        rng.shuffle(rules)
        rng.shuffle(facts)
        a = materialize(p, d, MaterialisationConfig(max_rounds=60))
        b = materialize(Program(tuple(rules)), Dataset(tuple(facts)), MaterialisationConfig(max_rounds=60))
        assert a.rounds == b.rounds and a.interpretation == b.interpretation
        assert a.interpretation.dump() == b.interpretation.dump()


def test_inflationary_rounds():
    for _, p, d, _ in _instances(30, offset=600):
        res = materialize(p, d, MaterialisationConfig(max_rounds=40, keep_history=True))
        for before, after in zip(res.history, res.history[1:]):
            assert before.contained_in(after)


def test_swap_operations():
    d = parse_dataset("P(a)@[1,2]\nQ(b)@(-inf,+inf)")
    assert unbounded(d) == [parse_fact("Q(b)@(-inf,+inf)")]
    assert render_program(swap(d)) == "boxplus[0,0] Q(b) :- top.\n"
    assert len(swap(parse_dataset("P(a)@[1,2]"))) == 0
    p, rest = swap_apply(Program(()), d)
    assert len(p) == 1 and rest == parse_dataset("P(a)@[1,2]")
    with pytest.raises(ValueError):
        to_rule(parse_fact("P(a)@[1,2]"))


def test_shift_law_on_rewritten_pairs():
    # every rewritten rule is guarded by a magic atom, so round 1 of the swapped
    # run only fires the seed rule and the runs stay exactly one round apart
    checked = 0
    for _, p, d, q in _instances(40, offset=900):
        out = magic_rewrite(p, d, Query(q.atom, Interval.everything()))
        plain = materialize(out.program, out.dataset, MaterialisationConfig(max_rounds=30, keep_history=True))
        prog, data = swap_apply(out.program, out.dataset)
        swapped = materialize(prog, data, MaterialisationConfig(max_rounds=31, keep_history=True))
        assert swapped.history[0] == least_model_of(d)
        for i, store in enumerate(plain.history):
            assert store == swapped.history[i + 1]
        if plain.reached_fixpoint:
            assert swapped.reached_fixpoint and swapped.rounds == plain.rounds + 1
        checked += 1
    assert checked == 40


def test_shift_law_needs_guarded_rules():
    # an unguarded rule already fires in round 1 of the swapped run
    p = normalize(parse_program("boxplus[0,0] R(X) :- P(X)."))
    d = parse_dataset("P(a)@1")
    e = parse_fact("S(a)@(-inf,+inf)")
    plain = materialize(p, d.union((e,)), MaterialisationConfig(keep_history=True))
    swapped = materialize(p.union((to_rule(e),)), d, MaterialisationConfig(keep_history=True))
    assert plain.history[0] != swapped.history[1]
    assert plain.interpretation == swapped.interpretation


def test_guard_widening_is_opt_in_and_sound():
    p = parse_program("boxplus[0,3] m_P_b(Z) :- diamondplus[1,1] m_P_b(Z).\n"
                      "boxplus[0,0] P(X) :- diamondplus[0,0] m_P_b(X), Q(X).", allow_reserved=True)
    d = parse_dataset("m_P_b(a)@0\nQ(a)@[0,20]", allow_reserved=True)
    plain = materialize(p, d, MaterialisationConfig(max_rounds=50))
    assert not plain.reached_fixpoint
    wide = materialize(p, d, MaterialisationConfig(max_rounds=50, widen_guards=3))
    assert wide.reached_fixpoint and [a.predicate.name for a in wide.widened] == ["m_P_b"]
    # original predicates are no larger than without guards
    assert wide.interpretation.dump().splitlines()[0] == "P(a)@[0,20]"
    with pytest.raises(ValueError):
        MaterialisationConfig(widen_guards=0)
