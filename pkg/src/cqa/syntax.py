"""Terms, atoms and the tokenizer shared by the constraint and query DSLs."""

from __future__ import annotations

import operator
import re
from dataclasses import dataclass
from functools import cached_property
from typing import Iterator, NamedTuple

from .errors import ParseError
from .model import Value

ORDER_OPS = ("<", ">", "<=", ">=")
BUILTIN_OPS = ("=", "!=") + ORDER_OPS

_COMPARE = {
    "=": operator.eq,
    "!=": operator.ne,
    "<": operator.lt,
    ">": operator.gt,
    "<=": operator.le,
    ">=": operator.ge,
}
NEGATED_OP = {"=": "!=", "!=": "=", "<": ">=", ">=": "<", ">": "<=", "<=": ">"}


@dataclass(frozen=True)
class Var:
    name: str

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class Const:
    value: Value

    def __str__(self):
        return format_constant(self.value)


def format_constant(v: Value) -> str:
    if isinstance(v, int):
        return str(v)
    return "'" + v.replace("\\", "\\\\").replace("'", "\\'") + "'"


def compare(op: str, a: Value, b: Value) -> bool:
    """Evaluate a built-in predicate on two values.

    Values of different domains are never equal; ordering them is false.
    """
    if isinstance(a, int) != isinstance(b, int):
        return op == "!="
    return _COMPARE[op](a, b)


# -- tokenizer ---------------------------------------------------------------

class Token(NamedTuple):
    kind: str  # ident, number, string, op, end
    text: str
    value: object
    line: int
    column: int


_TOKEN = re.compile(r"""
    (?P<ws>\s+)
  | (?P<string>'(?:[^'\\]|\\.)*'|"(?:[^"\\]|\\.)*")
  | (?P<op>->|<=|>=|!=|[=<>!&|(),.:~])
  | (?P<number>-?[0-9]+)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
""", re.VERBOSE)

_ESCAPE = re.compile(r"\\(.)")


def tokenize(text: str, line: int = 1) -> list:
    tokens = []
    pos = 0
    line_start = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        tok = m.group()
        col = pos - line_start + 1
        if kind == "ws":
            for i, ch in enumerate(tok):
                if ch == "\n":
                    line += 1
                    line_start = pos + i + 1
        elif kind == "string":
            tokens.append(Token("string", tok, _ESCAPE.sub(r"\1", tok[1:-1]), line, col))
        elif kind == "number":
            tokens.append(Token("number", tok, int(tok), line, col))
        else:
            tokens.append(Token(kind, tok, tok, line, col))
        pos = m.end()
    tokens.append(Token("end", "", None, line, pos - line_start + 1))
    return tokens


class TokenStream:
    def __init__(self, tokens):
        self.tokens = tokens
        self.i = 0

    @property
    def peek(self) -> Token:
        return self.tokens[self.i]

    def lookahead(self, k: int) -> Token:
        return self.tokens[min(self.i + k, len(self.tokens) - 1)]

    def next(self) -> Token:
        tok = self.tokens[self.i]
        if tok.kind != "end":
            self.i += 1
        return tok

    def at(self, text: str) -> bool:
        tok = self.peek
        return tok.kind in ("op", "ident") and tok.text == text

    def accept(self, text: str) -> bool:
        if self.at(text):
            self.next()
            return True
        return False

    def expect(self, text: str) -> Token:
        if not self.at(text):
            self.error(f"expected {text!r}")
        return self.next()

    def error(self, message: str, tok: Token | None = None):
        tok = tok or self.peek
        found = "end of input" if tok.kind == "end" else repr(tok.text)
        raise ParseError(f"{message}, found {found}", tok.line, tok.column)


def parse_term(ts: TokenStream):
    tok = ts.peek
    if tok.kind == "ident":
        ts.next()
        return Var(tok.text)
    if tok.kind in ("number", "string"):
        ts.next()
        return Const(tok.value)
    ts.error("expected a variable or constant")


def parse_atom_args(ts: TokenStream) -> tuple:
    ts.expect("(")
    terms = []
    if not ts.at(")"):
        terms.append(parse_term(ts))
        while ts.accept(","):
            terms.append(parse_term(ts))
    ts.expect(")")
    return tuple(terms)


def term_vars(terms) -> Iterator[str]:
    for t in terms:
        if isinstance(t, Var):
            yield t.name


# -- formulas ----------------------------------------------------------------

class Formula:
    """Base of the first-order AST. Nodes are frozen dataclasses."""

    @cached_property
    def free_vars(self) -> tuple:
        """Free variables in order of first occurrence."""
        seen = {}
        _collect_free(self, frozenset(), seen)
        return tuple(seen)

    @cached_property
    def is_quantifier_free(self) -> bool:
        return not any(isinstance(n, (Exists, Forall)) for n in walk(self))

    def __str__(self):
        return format_formula(self)


@dataclass(frozen=True)
class RelAtom(Formula):
    relation: str
    terms: tuple

    @property
    def is_ground(self) -> bool:
        return all(isinstance(t, Const) for t in self.terms)

    def row(self) -> tuple:
        return tuple(t.value for t in self.terms)


@dataclass(frozen=True)
class BuiltinAtom(Formula):
    op: str
    lhs: object
    rhs: object

    def __post_init__(self):
        if self.op not in BUILTIN_OPS:
            raise ValueError(f"unknown built-in {self.op!r}")


@dataclass(frozen=True)
class Truth(Formula):
    value: bool


@dataclass(frozen=True)
class Not(Formula):
    body: Formula


@dataclass(frozen=True)
class And(Formula):
    parts: tuple


@dataclass(frozen=True)
class Or(Formula):
    parts: tuple


@dataclass(frozen=True)
class Implies(Formula):
    lhs: Formula
    rhs: Formula


@dataclass(frozen=True)
class Exists(Formula):
    vars: tuple
    body: Formula


@dataclass(frozen=True)
class Forall(Formula):
    vars: tuple
    body: Formula


TRUE = Truth(True)
FALSE = Truth(False)


def conj(*parts) -> Formula:
    flat = []
    for p in parts:
        flat.extend(p.parts if isinstance(p, And) else (p,))
    if not flat:
        return TRUE
    return flat[0] if len(flat) == 1 else And(tuple(flat))


def disj(*parts) -> Formula:
    flat = []
    for p in parts:
        flat.extend(p.parts if isinstance(p, Or) else (p,))
    if not flat:
        return FALSE
    return flat[0] if len(flat) == 1 else Or(tuple(flat))


def children(f: Formula) -> tuple:
    if isinstance(f, (And, Or)):
        return f.parts
    if isinstance(f, Not):
        return (f.body,)
    if isinstance(f, Implies):
        return (f.lhs, f.rhs)
    if isinstance(f, (Exists, Forall)):
        return (f.body,)
    return ()


def walk(f: Formula) -> Iterator[Formula]:
    stack = [f]
    while stack:
        node = stack.pop()
        yield node
        stack.extend(reversed(children(node)))


def atom_terms(f: Formula) -> tuple:
    if isinstance(f, RelAtom):
        return f.terms
    if isinstance(f, BuiltinAtom):
        return (f.lhs, f.rhs)
    return ()


def _collect_free(f, bound, seen):
    if isinstance(f, (RelAtom, BuiltinAtom)):
        for name in term_vars(atom_terms(f)):
            if name not in bound:
                seen.setdefault(name, None)
    elif isinstance(f, (Exists, Forall)):
        _collect_free(f.body, bound | set(f.vars), seen)
    else:
        for c in children(f):
            _collect_free(c, bound, seen)


def constants(f: Formula) -> set:
    return {t.value for node in walk(f) for t in atom_terms(node) if isinstance(t, Const)}


def substitute(f: Formula, mapping: dict) -> Formula:
    """Replace free variables by terms (``mapping``: name -> Var | Const)."""
    def term(t, bound):
        if isinstance(t, Var) and t.name not in bound and t.name in mapping:
            return mapping[t.name]
        return t

    def go(node, bound):
        if isinstance(node, RelAtom):
            return RelAtom(node.relation, tuple(term(t, bound) for t in node.terms))
        if isinstance(node, BuiltinAtom):
            return BuiltinAtom(node.op, term(node.lhs, bound), term(node.rhs, bound))
        if isinstance(node, Not):
            return Not(go(node.body, bound))
        if isinstance(node, And):
            return And(tuple(go(p, bound) for p in node.parts))
        if isinstance(node, Or):
            return Or(tuple(go(p, bound) for p in node.parts))
        if isinstance(node, Implies):
            return Implies(go(node.lhs, bound), go(node.rhs, bound))
        if isinstance(node, (Exists, Forall)):
            return type(node)(node.vars, go(node.body, bound | set(node.vars)))
        return node

    return go(f, frozenset())


# -- printing ----------------------------------------------------------------

_PREC = {Exists: 0, Forall: 0, Implies: 1, Or: 2, And: 3, Not: 4}


def format_formula(f: Formula, ctx: int = 0) -> str:
    prec = _PREC.get(type(f), 5)
    if isinstance(f, RelAtom):
        s = f"{f.relation}({', '.join(map(str, f.terms))})"
    elif isinstance(f, BuiltinAtom):
        s = f"{f.lhs} {f.op} {f.rhs}"
    elif isinstance(f, Truth):
        s = "true" if f.value else "false"
    elif isinstance(f, Not):
        s = "!" + format_formula(f.body, 5)
    elif isinstance(f, And):
        s = " & ".join(format_formula(p, 4) for p in f.parts)
    elif isinstance(f, Or):
        s = " | ".join(format_formula(p, 3) for p in f.parts)
    elif isinstance(f, Implies):
        s = f"{format_formula(f.lhs, 2)} -> {format_formula(f.rhs, 1)}"
    elif isinstance(f, (Exists, Forall)):
        kw = "exists" if isinstance(f, Exists) else "forall"
        s = f"{kw} {','.join(f.vars)}. {format_formula(f.body, 0)}"
    else:
        raise TypeError(f"not a formula: {f!r}")
    return f"({s})" if prec < ctx else s


def _term_json(t):
    if isinstance(t, Var):
        return {"var": t.name}
    return {"const": t.value}


def to_json(f: Formula) -> dict:
    """JSON-ready dict form of a formula, for debugging output."""
    if isinstance(f, RelAtom):
        return {"atom": f.relation, "terms": [_term_json(t) for t in f.terms]}
    if isinstance(f, BuiltinAtom):
        return {"builtin": f.op, "lhs": _term_json(f.lhs), "rhs": _term_json(f.rhs)}
    if isinstance(f, Truth):
        return {"truth": f.value}
    if isinstance(f, Not):
        return {"not": to_json(f.body)}
    if isinstance(f, And):
        return {"and": [to_json(p) for p in f.parts]}
    if isinstance(f, Or):
        return {"or": [to_json(p) for p in f.parts]}
    if isinstance(f, Implies):
        return {"implies": [to_json(f.lhs), to_json(f.rhs)]}
    kw = "exists" if isinstance(f, Exists) else "forall"
    return {kw: list(f.vars), "body": to_json(f.body)}
