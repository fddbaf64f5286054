"""Denial constraints, functional dependencies and consistency checking."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterator

from .errors import ParseError, TypeCheckError
from .join import Matcher, TupleIndex
from .model import NUM, Instance, Schema, value_type
from .syntax import (ORDER_OPS, BuiltinAtom, Const, RelAtom, TokenStream, Var,
                     parse_atom_args, parse_term, term_vars, tokenize, BUILTIN_OPS)


@dataclass(frozen=True)
class DenialConstraint:
    """``forall vars. not [R(..) & ... & R(..) & builtins]``."""

    literals: tuple
    builtins: tuple = ()
    origin: object = field(default=None, compare=False)

    def __post_init__(self):
        if not self.literals:
            raise TypeCheckError("a denial constraint needs at least one relation literal")
        literal_vars = {v for lit in self.literals for v in term_vars(lit.terms)}
        for b in self.builtins:
            unsafe = set(term_vars((b.lhs, b.rhs))) - literal_vars
            if unsafe:
                raise TypeCheckError(
                    f"variable(s) {sorted(unsafe)} in built-in '{b}' do not occur in a relation literal")

    @cached_property
    def matcher(self) -> Matcher:
        return Matcher([lit.terms for lit in self.literals],
                       [(b.op, b.lhs, b.rhs) for b in self.builtins])

    def __str__(self):
        return "denial: " + ", ".join(str(x) for x in self.literals + self.builtins)


@dataclass(frozen=True)
class FD:
    lhs: tuple
    rhs: tuple

    def __post_init__(self):
        object.__setattr__(self, "lhs", tuple(self.lhs))
        object.__setattr__(self, "rhs", tuple(self.rhs))
        if not self.rhs:
            raise TypeCheckError("an FD needs a non-empty right-hand side")
        if set(self.lhs) & set(self.rhs):
            raise TypeCheckError(f"FD sides overlap: {sorted(set(self.lhs) & set(self.rhs))}")
        if len(set(self.lhs)) != len(self.lhs) or len(set(self.rhs)) != len(self.rhs):
            raise TypeCheckError("repeated attribute in FD")

    def check(self, schema: Schema) -> None:
        for name in self.lhs + self.rhs:
            schema.position(name)

    def __str__(self):
        return f"fd: {', '.join(self.lhs)} -> {', '.join(self.rhs)}"


@dataclass(frozen=True)
class ConstraintSet:
    """Constraints over one schema. FDs are kept in FD form and compiled
    to denials on demand; ``denials`` holds the other constraints."""

    schema: Schema
    fds: tuple = ()
    denials: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "fds", tuple(self.fds))
        object.__setattr__(self, "denials", tuple(self.denials))
        for fd in self.fds:
            fd.check(self.schema)
        for c in self.denials:
            check_denial(c, self.schema)

    @cached_property
    def all_denials(self) -> tuple:
        compiled = tuple(d for fd in self.fds for d in fd_to_denial(fd, self.schema))
        return compiled + self.denials

    @property
    def single_fd(self):
        """The FD when the set is exactly one FD and nothing else."""
        if len(self.fds) == 1 and not self.denials:
            return self.fds[0]
        return None

    def __len__(self):
        return len(self.fds) + len(self.denials)

    def to_dsl(self) -> str:
        return "".join(f"{c}\n" for c in self.fds + self.denials)


# -- typing ------------------------------------------------------------------

def _term_type(term, var_types):
    if isinstance(term, Const):
        return value_type(term.value)
    return var_types.get(term.name)


def check_denial(c: DenialConstraint, schema: Schema) -> dict:
    """Type-check ``c`` against ``schema``; return the variable types."""
    var_types = {}
    for lit in c.literals:
        if lit.relation != schema.relation:
            raise TypeCheckError(f"unknown relation {lit.relation!r} (schema has {schema.relation})")
        if len(lit.terms) != schema.arity:
            raise TypeCheckError(
                f"{lit} has {len(lit.terms)} terms, {schema.relation} has arity {schema.arity}")
        for term, attr in zip(lit.terms, schema.attributes):
            if isinstance(term, Const):
                if value_type(term.value) != attr.type:
                    raise TypeCheckError(f"constant {term} in {attr.type} position {attr.name}")
            elif var_types.setdefault(term.name, attr.type) != attr.type:
                raise TypeCheckError(
                    f"variable {term.name} used at both {var_types[term.name]} and {attr.type} positions")
    for b in c.builtins:
        lt, rt = _term_type(b.lhs, var_types), _term_type(b.rhs, var_types)
        if lt != rt:
            raise TypeCheckError(f"built-in '{b}' compares {lt} with {rt}")
        if b.op in ORDER_OPS and lt != NUM:
            raise TypeCheckError(f"order comparison '{b}' needs numbers, got {lt}")
    return var_types


# -- DSL ---------------------------------------------------------------------

def _parse_builtin(ts: TokenStream) -> BuiltinAtom:
    lhs = parse_term(ts)
    tok = ts.peek
    if tok.kind != "op" or tok.text not in BUILTIN_OPS:
        ts.error("expected a comparison operator")
    ts.next()
    return BuiltinAtom(tok.text, lhs, parse_term(ts))


def _parse_denial_body(ts: TokenStream) -> DenialConstraint:
    literals, builtins = [], []
    fresh = 0
    while True:
        tok = ts.peek
        if tok.kind == "ident" and ts.lookahead(1).text == "(":
            ts.next()
            terms = []
            for t in parse_atom_args(ts):
                if isinstance(t, Var) and t.name == "_":
                    fresh += 1
                    t = Var(f"_{fresh}")
                terms.append(t)
            literals.append(RelAtom(tok.text, tuple(terms)))
        else:
            builtins.append(_parse_builtin(ts))
        if not ts.accept(","):
            break
    if ts.peek.kind != "end":
        ts.error("expected ',' or end of line")
    return DenialConstraint(tuple(literals), tuple(builtins))


def _parse_names(ts: TokenStream) -> list:
    names = []
    while ts.peek.kind == "ident":
        names.append(ts.next().text)
        if not ts.accept(","):
            break
    return names


def _parse_fd(ts: TokenStream) -> FD:
    lhs = _parse_names(ts)
    ts.expect("->")
    rhs = _parse_names(ts)
    if ts.peek.kind != "end":
        ts.error("expected end of line")
    return FD(tuple(lhs), tuple(rhs))


def parse_constraint(line: str, schema: Schema, lineno: int = 1):
    """Parse one ``fd:`` or ``denial:`` line into an FD or DenialConstraint."""
    ts = TokenStream(tokenize(line, lineno))
    kind = ts.next()
    if kind.kind != "ident" or kind.text not in ("fd", "denial"):
        ts.error("expected 'fd:' or 'denial:'", kind)
    ts.expect(":")
    try:
        if kind.text == "fd":
            c = _parse_fd(ts)
            c.check(schema)
        else:
            c = _parse_denial_body(ts)
            check_denial(c, schema)
    except TypeCheckError as e:
        raise ParseError(str(e), lineno, kind.column) from None
    return c


def parse_constraints(dsl_text: str, schema: Schema) -> ConstraintSet:
    """Parse the constraint DSL: one ``fd:``/``denial:`` per line, ``#`` comments."""
    fds, denials = [], []
    for lineno, line in enumerate(dsl_text.splitlines(), 1):
        line = strip_comment(line)
        if not line.strip():
            continue
        c = parse_constraint(line, schema, lineno)
        (fds if isinstance(c, FD) else denials).append(c)
    return ConstraintSet(schema, tuple(fds), tuple(denials))


def strip_comment(line: str) -> str:
    """Drop a trailing ``#`` comment; a ``#`` inside quotes is kept."""
    quote = None
    escaped = False
    for i, ch in enumerate(line):
        if quote:
            if escaped:
                escaped = False
            elif ch == "\\":
                escaped = True
            elif ch == quote:
                quote = None
        elif ch in "'\"":
            quote = ch
        elif ch == "#":
            return line[:i]
    return line


# -- semantics ---------------------------------------------------------------

def fd_to_denial(fd: FD, schema: Schema) -> tuple:
    """One two-literal denial per right-hand-side attribute.

    Left-hand-side agreement is expressed by sharing variables between the
    two literals.
    """
    fd.check(schema)
    lhs = {schema.position(a) for a in fd.lhs}
    first = tuple(Var(f"x{i}") for i in range(schema.arity))
    second = tuple(Var(f"x{i}") if i in lhs else Var(f"y{i}") for i in range(schema.arity))
    out = []
    for a in fd.rhs:
        i = schema.position(a)
        out.append(DenialConstraint(
            (RelAtom(schema.relation, first), RelAtom(schema.relation, second)),
            (BuiltinAtom("!=", first[i], second[i]),),
            origin=fd))
    return tuple(out)


def iter_violations(rows, c: DenialConstraint) -> Iterator[frozenset]:
    """Tuple sets violating ``c`` (may repeat). ``rows`` is an Instance,
    a TupleIndex or any collection of rows."""
    index = _as_index(rows)
    for _, chosen in c.matcher.solutions(index):
        yield frozenset(chosen)


def violations(instance, c: DenialConstraint) -> set:
    return set(iter_violations(instance, c))


def is_consistent(instance, cs: ConstraintSet) -> bool:
    index = _as_index(instance)
    for c in cs.all_denials:
        for _ in c.matcher.solutions(index):
            return False
    return True


def _as_index(rows) -> TupleIndex:
    if isinstance(rows, TupleIndex):
        return rows
    if isinstance(rows, Instance):
        return TupleIndex(rows.tuples)
    return TupleIndex(list(rows))
