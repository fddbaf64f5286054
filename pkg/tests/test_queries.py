import itertools

import pytest
from hypothesis import given, settings, strategies as st

from cqa import Fragment, Instance, ParseError, QueryError, Schema, eval_fo, fragment, ground, to_cnf
from cqa.queries import candidate_bindings, check_query, parse_query, phi_over_attributes
from cqa.syntax import (And, BuiltinAtom, Const, Implies, Not, Or, RelAtom, Truth, to_json)

from conftest import T1, T2

R3 = Schema.of("R", A="sym", B="sym", C="sym")
BROWN_OR = ("Person('Brown','Amherst','115 Klein') | Person('Brown','Amherst','120 Maple')")


def test_brown_disjunction_is_ground_qfree(person):
    q = parse_query(BROWN_OR, person[0].schema)
    assert fragment(q) is Fragment.GROUND_QFREE
    assert q.free_vars == ()


def test_projection_query_is_general():
    q = parse_query("exists s. Person(n,c,s)")
    assert fragment(q) is Fragment.GENERAL
    assert q.free_vars == ("n", "c")


def test_single_literal_existential_shape():
    schema = Schema.of("R", A="sym", B="sym", C="num")
    q = parse_query("exists x,y,z. R(x,y,z) & z < 5", schema)
    assert fragment(q) is Fragment.SINGLE_LITERAL_EXISTENTIAL
    two = parse_query("exists x,y,z. R(x,y,z) & R(y,x,z)", schema)
    assert fragment(two) is Fragment.GENERAL


def test_phi_over_attributes_turns_constants_into_equations():
    schema = Schema.of("R", A="sym", B="sym", C="num")
    q = parse_query("exists x,z. R(x,x,z) & z > 1", schema)
    assert str(phi_over_attributes(q, schema)) == "C > 1 & B = A"
    q = parse_query("exists x. R(x,'b',3)", schema)
    assert str(phi_over_attributes(q, schema)) == "B = 'b' & C = 3"


@pytest.mark.parametrize("text", [
    "exists x,y. R(x,y,'c') & !R(y,x,'c')",
    "forall x. R(x,'a','b') -> x = 'a' | x != 'b'",
    "!(R('a','b','c') & R('a','b','d'))",
    "(R('a','b','c') -> R('b','c','d')) -> R('c','d','e')",
    "true & !false",
    "exists x. R(x,'it\\'s','c')",
])
def test_printing_round_trips(text):
    q = parse_query(text, R3)
    assert parse_query(str(q), R3) == q


def test_implication_is_right_associative():
    q = parse_query("R('a','a','a') -> R('b','b','b') -> R('c','c','c')")
    assert isinstance(q, Implies) and isinstance(q.rhs, Implies)


@pytest.mark.parametrize("text, where", [
    ("R(x,y,'c') &", 13),
    ("exists . R(x,y,z)", 8),
    ("R(x,y,z) R(x,y,z)", 10),
    ("R(x, y, z) @", 12),
])
def test_syntax_errors_have_positions(text, where):
    with pytest.raises(ParseError) as err:
        parse_query(text)
    assert err.value.column == where


@pytest.mark.parametrize("text", [
    "R(x,y)",                       # arity
    "S(x,y,z)",                     # relation
    "R(x,y,z) & x < y",             # order on symbols
    "R(x,y,z) & x = 3",             # sym vs num
    "exists x. exists x. R(x,x,x)", # re-quantification
])
def test_type_errors(text):
    with pytest.raises(ParseError):
        parse_query(text, R3)


def test_quantifying_a_free_variable_is_rejected():
    with pytest.raises(ParseError):
        parse_query("R(x,y,z) & exists x. R(x,x,x)", R3)


def test_cnf_of_brown_disjunction():
    (clause,) = to_cnf(parse_query(BROWN_OR))
    assert clause.positives == (T1, T2) and clause.negatives == ()


def test_cnf_distribution_and_tautology():
    a, b, c = "R('a','a','a')", "R('b','b','b')", "R('c','c','c')"
    assert len(to_cnf(parse_query(f"{a} & ({b} | {c})"))) == 2
    assert len(to_cnf(parse_query(f"{a} | ({b} & {c})"))) == 2
    assert to_cnf(parse_query(f"{a} | !{a}")) == []


def test_cnf_folds_ground_builtins():
    a = "R('a','a','a')"
    assert to_cnf(parse_query(f"{a} | 1 < 2")) == []
    (clause,) = to_cnf(parse_query(f"{a} | 2 < 1"))
    assert len(clause) == 1
    (empty,) = to_cnf(parse_query("1 = 2"))
    assert len(empty) == 0


def test_cnf_needs_ground_input():
    with pytest.raises(QueryError):
        to_cnf(parse_query("R(x,'a','a')"))


def test_eval_fo_examples(person):
    inst, _ = person
    assert eval_fo(inst, parse_query("Person('Green','Clarence','4000 Transit')"))
    assert not eval_fo(inst, parse_query("exists x,y,z. Person(x,y,z) & !Person(x,y,z)"))
    assert eval_fo(inst, parse_query("forall n,c,s. Person(n,c,s) -> exists t. Person(n,c,t)"))
    assert not eval_fo(inst, parse_query("forall n,c,s. Person(n,c,s) -> c = 'Amherst'"))


def test_eval_fo_needs_bindings(person):
    with pytest.raises(QueryError):
        eval_fo(person[0], parse_query("Person(n,'Amherst','115 Klein')"))
    assert eval_fo(person[0], parse_query("Person(n,'Amherst','115 Klein')"), {"n": "Brown"})


def test_ground_substitutes_free_variables_only(person):
    schema = person[0].schema
    q = parse_query("exists s. Person(n,c,s)", schema)
    g = ground(q, {"n": "Green", "c": "Clarence"}, schema)
    assert g.free_vars == () and str(g) == "exists s. Person('Green', 'Clarence', s)"
    sentence = parse_query(BROWN_OR)
    assert ground(sentence, {}) == sentence
    with pytest.raises(QueryError):
        ground(q, {"n": "Green"})


def test_ground_type_error():
    schema = Schema.of("R", A="sym")
    with pytest.raises(Exception, match="sym|num"):
        ground(parse_query("R(x)"), {"x": 5}, schema)


def test_candidates_come_from_guard_joins(person):
    inst, _ = person
    q = parse_query("exists s. Person(n,c,s)", inst.schema)
    assert candidate_bindings(inst, q) == [("Brown", "Amherst"), ("Green", "Clarence")]


def test_json_form():
    assert to_json(parse_query("!R('a',x,'b')")) == {
        "not": {"atom": "R", "terms": [{"const": "a"}, {"var": "x"}, {"const": "b"}]}}


def test_unguarded_variable_types_are_inferred():
    types = check_query(parse_query("R(x,y,z) & !R(z,y,x)"), R3)
    assert types == {"x": "sym", "y": "sym", "z": "sym"}


# -- CNF equivalence over every subset of the mentioned atoms ----------------

ATOMS = [RelAtom("R", (Const(f"t{i}"), Const("a"), Const("b"))) for i in range(5)]
leaves = st.one_of(
    st.sampled_from(ATOMS),
    st.builds(lambda a, b, op: BuiltinAtom(op, Const(a), Const(b)),
              st.integers(0, 2), st.integers(0, 2), st.sampled_from(["=", "!=", "<", ">="])),
    st.sampled_from([Truth(True), Truth(False)]))
formulas = st.recursive(leaves, lambda sub: st.one_of(
    st.builds(Not, sub),
    st.builds(lambda ps: And(tuple(ps)), st.lists(sub, min_size=2, max_size=3)),
    st.builds(lambda ps: Or(tuple(ps)), st.lists(sub, min_size=2, max_size=3)),
    st.builds(Implies, sub, sub)), max_leaves=10)


def truth(f, world):
    if isinstance(f, RelAtom):
        return f.row() in world
    if isinstance(f, BuiltinAtom):
        return {"=": f.lhs.value == f.rhs.value, "!=": f.lhs.value != f.rhs.value,
                "<": f.lhs.value < f.rhs.value, ">=": f.lhs.value >= f.rhs.value}[f.op]
    if isinstance(f, Truth):
        return f.value
    if isinstance(f, Not):
        return not truth(f.body, world)
    if isinstance(f, And):
        return all(truth(p, world) for p in f.parts)
    if isinstance(f, Or):
        return any(truth(p, world) for p in f.parts)
    return not truth(f.lhs, world) or truth(f.rhs, world)


@settings(max_examples=300, deadline=None)
@given(formulas)
def test_cnf_is_equivalent_on_every_world(f):
    clauses = to_cnf(f)
    rows = [a.row() for a in ATOMS]
    for bits in itertools.product((False, True), repeat=len(rows)):
        world = {r for r, b in zip(rows, bits) if b}
        assert truth(f, world) == all(c.holds_in(world) for c in clauses)
        assert eval_fo(Instance(R3, world), f) == truth(f, world)
    for c in clauses:
        assert not set(c.positives) & set(c.negatives)
