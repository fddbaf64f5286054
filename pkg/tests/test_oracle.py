import random

import pytest
from hypothesis import given, settings, strategies as st

from cqa import (AnswerStatus, BudgetExceeded, ConstraintSet, Instance, QueryError, Schema,
                 build_hypergraph, count_repairs, enumerate_repairs, exists_falsifying_repair,
                 is_consistent, oracle_answers, oracle_status, parse_query)
from cqa.oracle import find_falsifying_repair
from cqa.selftest import SCHEMA, powerset_repairs, random_denial, random_instance, two_choice_family

from conftest import T1, T2, T3

BROWN_OR = "Person('Brown','Amherst','115 Klein') | Person('Brown','Amherst','120 Maple')"
R3 = Schema.of("R", A="sym", B="sym", C="sym")


def test_person_has_two_repairs(person):
    repairs = list(enumerate_repairs(build_hypergraph(*person)))
    assert sorted(repairs, key=sorted) == [frozenset({T1, T3}), frozenset({T2, T3})]


def test_two_choice_family_n2():
    assert len(list(enumerate_repairs(build_hypergraph(*two_choice_family(2))))) == 4


def test_consistent_instance_is_its_own_repair():
    inst = Instance(R3, [("a", "b", "c")])
    assert list(enumerate_repairs(build_hypergraph(inst, ConstraintSet(R3)))) == [inst.tuples]


def test_lazy_hypergraph_is_enumerated_too(person):
    assert len(list(enumerate_repairs(build_hypergraph(*person, "lazy")))) == 2


def test_falsifying_repairs(person):
    inst, cs = person
    assert not exists_falsifying_repair(inst, cs, parse_query(BROWN_OR))
    t1 = parse_query("Person('Brown','Amherst','115 Klein')")
    assert find_falsifying_repair(inst, cs, t1) == {T2, T3}
    assert not exists_falsifying_repair(inst, cs, parse_query("true | false"))
    with pytest.raises(QueryError):
        exists_falsifying_repair(inst, cs, parse_query("Person(n,'a','b')"))


def test_statuses(person):
    inst, cs = person
    status = lambda text: oracle_status(inst, cs, parse_query(text))
    assert status("exists s. Person('Brown','Amherst',s)") is AnswerStatus.CONSISTENTLY_TRUE
    assert status("Person('Brown','Amherst','115 Klein')") is AnswerStatus.UNDETERMINED
    assert status("Person('Brown','Boston','1 Main')") is AnswerStatus.CONSISTENTLY_FALSE
    empty = Instance(R3)
    assert oracle_status(empty, ConstraintSet(R3), parse_query("exists x,y,z. R(x,y,z)")) \
        is AnswerStatus.CONSISTENTLY_FALSE


def test_answers(person):
    inst, cs = person
    assert oracle_answers(inst, cs, parse_query("Person(n,c,s)")) == {T3}
    assert oracle_answers(inst, cs, parse_query("exists s. Person(n,c,s)")) == {
        ("Brown", "Amherst"), ("Green", "Clarence")}
    assert oracle_answers(Instance(R3), ConstraintSet(R3), parse_query("R(x,y,z)")) == set()


def test_budget_is_loud():
    hg = build_hypergraph(*two_choice_family(8))
    with pytest.raises(BudgetExceeded):
        list(enumerate_repairs(hg, budget=50))
    with pytest.raises(BudgetExceeded):
        count_repairs(hg, budget=5)


def test_counting_multiplies_components():
    for n in range(1, 11):
        assert count_repairs(build_hypergraph(*two_choice_family(n))) == 2 ** n


seeds = st.integers(0, 10**9)


def _case(seed, tuples=12):
    rng = random.Random(seed)
    inst = random_instance(rng, max_tuples=tuples)
    cs = ConstraintSet(SCHEMA, (), tuple(random_denial(rng) for _ in range(rng.randint(1, 2))))
    return rng, inst, cs


@settings(max_examples=120, deadline=None)
@given(seeds)
def test_repairs_are_exactly_the_maximal_consistent_subsets(seed):
    _, inst, cs = _case(seed)
    hg = build_hypergraph(inst, cs)
    repairs = list(enumerate_repairs(hg))
    assert len(repairs) == len(set(repairs))
    assert set(repairs) == powerset_repairs(inst, cs)
    assert count_repairs(hg) == len(repairs)
    for r in repairs:
        assert is_consistent(inst.subset(r), cs) and hg.is_repair(r)


@settings(max_examples=60, deadline=None)
@given(seeds)
def test_no_repair_is_dominated_in_the_deletion_order(seed):
    # r' is a repair iff no consistent subset deletes strictly fewer tuples
    _, inst, cs = _case(seed, tuples=8)
    repairs = list(enumerate_repairs(build_hypergraph(inst, cs)))
    rows = inst.rows
    for mask in range(2 ** len(rows)):
        other = frozenset(r for k, r in enumerate(rows) if mask >> k & 1)
        if not is_consistent(inst.subset(other), cs):
            continue
        for r in repairs:
            if inst.tuples - r >= inst.tuples - other:
                assert r == other


@settings(max_examples=80, deadline=None)
@given(seeds)
def test_status_and_falsifying_search_agree(seed):
    from cqa.selftest import random_ground_sentence
    rng, inst, cs = _case(seed, tuples=10)
    text = random_ground_sentence(rng, inst)
    for q in (text, f"exists x. R(x,'a',0) | {text}"):
        sentence = parse_query(q, SCHEMA)
        status = oracle_status(inst, cs, sentence)
        assert (status is AnswerStatus.CONSISTENTLY_TRUE) == (
            not exists_falsifying_repair(inst, cs, sentence))
