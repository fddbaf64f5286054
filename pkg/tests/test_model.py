import pytest
from hypothesis import given, strategies as st

from cqa import Instance, ParseError, Schema, TypeCheckError, active_domain, load_instance
from cqa.model import format_cell, parse_cell, parse_instance, serialize_instance, value_type

from conftest import PERSON_CSV, T1, T2, T3


def test_person_rows_load_as_three_tuples():
    inst = load_instance(PERSON_CSV)
    assert inst.schema.relation == "Person"
    assert inst.schema.names == ("Name", "City", "Street")
    assert inst.tuples == {T1, T2, T3}


def test_empty_body_gives_empty_instance():
    inst = parse_instance("A:sym,B:num\n", Schema.of("R", A="sym", B="num"))
    assert len(inst) == 0


def test_duplicate_rows_collapse():
    inst = load_instance("A:sym,B:num\nx,1\nx,1\n")
    assert inst.rows == (("x", 1),)


def test_active_domain_of_person():
    assert active_domain(load_instance(PERSON_CSV)) == {
        "Brown", "Green", "Amherst", "Clarence", "115 Klein", "120 Maple", "4000 Transit"}


def test_active_domain_edge_cases():
    schema = Schema.of("R", A="sym", B="sym", C="sym")
    assert active_domain(Instance(schema)) == set()
    assert active_domain(Instance(schema, [("a", "a", "a")])) == {"a"}


def test_cell_typing():
    assert parse_cell("42", False) == 42
    assert parse_cell("-7", False) == -7
    assert parse_cell("42", True) == "42"
    assert parse_cell("abc", False) == "abc"
    assert value_type(3) == "num" and value_type("3") == "sym"
    with pytest.raises(TypeCheckError):
        value_type(True)


def test_sym_and_num_never_equal():
    schema = Schema.of("R", A="sym")
    with pytest.raises(TypeCheckError):
        Instance(schema, [(1,)])


@pytest.mark.parametrize("text, line, col", [
    ("A:sym,B:num\nx,y\n", 2, 3),          # type mismatch in column B
    ("A:sym,B:num\nx\n", 2, 1),            # arity mismatch
    ("A:sym,B:num\nx,1\n\"unterminated,2\n", 3, None),
])
def test_cell_errors_carry_position(text, line, col):
    with pytest.raises(ParseError) as err:
        load_instance(text)
    assert err.value.line == line
    if col is not None:
        assert err.value.column == col


def test_unknown_header_is_rejected():
    with pytest.raises(ParseError, match="unknown header"):
        parse_instance("A:sym,Z:num\n", Schema.of("R", A="sym", B="num"))


def test_header_needs_types():
    with pytest.raises(ParseError):
        load_instance("A,B\nx,y\n")


def test_comment_lines_are_ignored():
    inst = load_instance("# a note\nA:sym\n# another\nx\n")
    assert inst.rows == (("x",),)


def test_quoting_forces_symbols():
    inst = load_instance('A:sym,B:num\n"12",12\n')
    assert inst.rows == (("12", 12),)
    assert format_cell("12") == '"12"'
    assert format_cell("a,b") == '"a,b"'
    assert format_cell('say "hi"') == '"say ""hi"""'


def test_canonical_row_order_puts_numbers_first():
    inst = load_instance("A:sym,B:num\nb,2\na,10\na,9\n")
    assert inst.rows == (("a", 9), ("a", 10), ("b", 2))


syms = st.text(alphabet=st.characters(blacklist_categories=("Cs", "Cc")), max_size=8)
rows = st.lists(st.tuples(syms, st.integers(-10**6, 10**6), syms), max_size=12)


@given(rows)
def test_serialize_then_parse_is_identity(rs):
    schema = Schema.of("R", A="sym", B="num", C="sym")
    inst = Instance(schema, rs)
    assert parse_instance(serialize_instance(inst), schema) == inst


@given(rows)
def test_active_domain_bounded_by_arity_times_size(rs):
    inst = Instance(Schema.of("R", A="sym", B="num", C="sym"), rs)
    assert len(active_domain(inst)) <= 3 * len(inst)
