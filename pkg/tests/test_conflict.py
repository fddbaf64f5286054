import random

import pytest
from hypothesis import given, settings, strategies as st

from cqa import (LAZY, MATERIALIZED, BudgetExceeded, ConstraintSet, FD, Instance, Schema,
                 build_hypergraph, minimal_edges)
from cqa.selftest import SCHEMA, random_denial, random_instance, two_choice_family

from conftest import T1, T2, T3
from naive import naive_edges


def test_person_hypergraph(person):
    hg = build_hypergraph(*person)
    assert len(hg.vertices) == 3
    assert hg.edges == [frozenset({T1, T2})]


def test_two_choice_family_has_disjoint_pairs():
    hg = build_hypergraph(*two_choice_family(3))
    assert len(hg.vertices) == 6 and len(hg.edges) == 3
    assert len(set().union(*hg.edges)) == 6


def test_consistent_instance_has_no_edges():
    schema = Schema.of("R", A="sym", B="sym")
    inst = Instance(schema, [("a", "b"), ("c", "b")])
    hg = build_hypergraph(inst, ConstraintSet(schema, (FD(("A",), ("B",)),)))
    assert hg.edges == [] and hg.edges_containing(("a", "b")) == []


@pytest.mark.parametrize("mode", [MATERIALIZED, LAZY])
def test_edges_containing(person, mode):
    hg = build_hypergraph(*person, mode)
    assert hg.edges_containing(T1) == [frozenset({T1, T2})]
    assert hg.edges_containing(T3) == []
    with pytest.raises(KeyError):
        hg.edges_containing(("Nobody", "x", "y"))


@pytest.mark.parametrize("mode", [MATERIALIZED, LAZY])
def test_is_independent(person, mode):
    hg = build_hypergraph(*person, mode)
    assert not hg.is_independent({T1, T2})
    assert hg.is_independent(set())
    assert hg.is_independent({T1, T3})


def test_extend_to_maximal(person):
    hg = build_hypergraph(*person)
    assert hg.extend_to_maximal({T1}) == {T1, T3}
    assert hg.extend_to_maximal({T1, T3}) == {T1, T3}
    with pytest.raises(ValueError):
        hg.extend_to_maximal({T1, T2})


def test_extend_empty_set_scans_in_canonical_order():
    hg = build_hypergraph(*two_choice_family(2))
    assert hg.extend_to_maximal(set()) == {("a1", "b0"), ("a2", "b0")}
    assert hg.is_repair({("a1", "b0"), ("a2", "b0")})


def test_edge_budget_points_to_lazy_mode():
    with pytest.raises(BudgetExceeded, match="lazy"):
        build_hypergraph(*two_choice_family(5), edge_budget=2)
    lazy = build_hypergraph(*two_choice_family(5), LAZY, edge_budget=2)
    assert len(lazy.edges_containing(("a1", "b0"))) == 1


def test_stats_and_minimization():
    schema = Schema.of("R", A="sym", B="sym")
    cs_text = "denial: R(x,y), x = y\ndenial: R(x,y), R(y,z)\n"
    from cqa import parse_constraints
    inst = Instance(schema, [("a", "a"), ("a", "b"), ("c", "d")])
    hg = build_hypergraph(inst, parse_constraints(cs_text, schema))
    stats = hg.stats()
    assert stats == {"vertices": 3, "edges": 2, "edge_size_histogram": {"1": 1, "2": 1},
                     "isolated_vertices": 1}
    assert hg.stats(minimize=True)["edges"] == 1
    assert minimal_edges([frozenset("ab"), frozenset("a"), frozenset("bc")]) == [
        frozenset("a"), frozenset("bc")]


seeds = st.integers(0, 10**9)


@settings(max_examples=150, deadline=None)
@given(seeds)
def test_lazy_and_materialized_agree(seed):
    rng = random.Random(seed)
    inst = random_instance(rng, max_tuples=10)
    cs = ConstraintSet(SCHEMA, (), tuple(random_denial(rng) for _ in range(rng.randint(1, 2))))
    eager = build_hypergraph(inst, cs)
    lazy = build_hypergraph(inst, cs, LAZY)
    assert set(eager.edges) == naive_edges(inst.rows, cs)
    for t in inst.rows:
        assert lazy.edges_containing(t) == eager.edges_containing(t)
    for _ in range(5):
        s = [t for t in inst.rows if rng.random() < 0.5]
        assert lazy.is_independent(s) == eager.is_independent(s)
        if eager.is_independent(s):
            assert lazy.extend_to_maximal(s) == eager.extend_to_maximal(s)
    assert lazy.edges == eager.edges
