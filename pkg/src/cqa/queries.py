"""First-order queries over the single relation: parsing, typing,
fragment recognition, ground CNF and active-domain evaluation."""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass

from .errors import ParseError, QueryError, TypeCheckError
from .join import Matcher, TupleIndex, match
from .model import NUM, SYM, Instance, Schema, row_key, sort_rows, value_key, value_type
from .syntax import (BUILTIN_OPS, FALSE, ORDER_OPS, TRUE, And, BuiltinAtom, Const,
                     Exists, Forall, Formula, Implies, Not, Or, RelAtom, TokenStream,
                     Truth, Var, children, compare, conj, constants, parse_atom_args,
                     parse_term, substitute, term_vars, tokenize, walk)

KEYWORDS = ("exists", "forall", "true", "false")


# -- parsing -----------------------------------------------------------------

class _Parser:
    def __init__(self, text: str):
        self.ts = TokenStream(tokenize(text))

    def parse(self) -> Formula:
        f = self.implies()
        if self.ts.peek.kind != "end":
            self.ts.error("unexpected token")
        return f

    def implies(self):
        lhs = self.disjunction()
        if self.ts.accept("->"):
            return Implies(lhs, self.implies())
        return lhs

    def disjunction(self):
        parts = [self.conjunction()]
        while self.ts.accept("|"):
            parts.append(self.conjunction())
        return parts[0] if len(parts) == 1 else Or(tuple(parts))

    def conjunction(self):
        parts = [self.unary()]
        while self.ts.accept("&"):
            parts.append(self.unary())
        return parts[0] if len(parts) == 1 else And(tuple(parts))

    def unary(self):
        ts = self.ts
        if ts.accept("!") or ts.accept("~"):
            return Not(self.unary())
        if ts.at("exists") or ts.at("forall"):
            kw = ts.next().text
            names = [self._var_name()]
            while ts.accept(","):
                names.append(self._var_name())
            ts.expect(".")
            body = self.implies()
            return (Exists if kw == "exists" else Forall)(tuple(names), body)
        return self.primary()

    def _var_name(self) -> str:
        tok = self.ts.peek
        if tok.kind != "ident" or tok.text in KEYWORDS:
            self.ts.error("expected a variable name")
        return self.ts.next().text

    def primary(self):
        ts = self.ts
        if ts.accept("("):
            f = self.implies()
            ts.expect(")")
            return f
        if ts.accept("true"):
            return TRUE
        if ts.accept("false"):
            return FALSE
        tok = ts.peek
        if tok.kind == "ident" and ts.lookahead(1).text == "(":
            ts.next()
            return RelAtom(tok.text, parse_atom_args(ts))
        lhs = parse_term(ts)
        op = ts.peek
        if op.kind != "op" or op.text not in BUILTIN_OPS:
            ts.error("expected a comparison operator")
        ts.next()
        return BuiltinAtom(op.text, lhs, parse_term(ts))


def parse_query(text: str, schema: Schema | None = None) -> Formula:
    """Parse query text; with a schema the result is also type-checked.

    >>> str(parse_query("exists s. Person(n, c, s)"))
    'exists s. Person(n, c, s)'
    """
    f = _Parser(text).parse()
    if schema is not None:
        try:
            check_query(f, schema)
        except TypeCheckError as e:
            raise ParseError(str(e)) from None
    return f


# -- typing ------------------------------------------------------------------

def check_query(f: Formula, schema: Schema) -> dict:
    """Type-check ``f`` and return ``{variable: "sym" | "num" | None}``.

    ``None`` marks a variable whose type nothing constrains; it ranges over
    the whole active domain.
    """
    _check_scopes(f)
    types = {}

    def assign(name, t, where):
        old = types.get(name)
        if old is None:
            types[name] = t
        elif t is not None and old != t:
            raise TypeCheckError(f"variable {name} is used as both {old} and {t} (in {where})")

    builtins = []
    for node in walk(f):
        if isinstance(node, RelAtom):
            if node.relation != schema.relation:
                raise TypeCheckError(f"unknown relation {node.relation!r}; the schema is {schema}")
            if len(node.terms) != schema.arity:
                raise TypeCheckError(f"{node} has {len(node.terms)} terms, "
                                     f"{schema.relation} has arity {schema.arity}")
            for t, attr in zip(node.terms, schema.attributes):
                if isinstance(t, Const):
                    if value_type(t.value) != attr.type:
                        raise TypeCheckError(f"constant {t} at {attr.type} position {attr.name} in {node}")
                else:
                    assign(t.name, attr.type, node)
        elif isinstance(node, BuiltinAtom):
            builtins.append(node)
        for name in _quantified(node):
            types.setdefault(name, None)
    for name in f.free_vars:
        types.setdefault(name, None)

    def term_type(t):
        return value_type(t.value) if isinstance(t, Const) else types.get(t.name)

    changed = True
    while changed:
        changed = False
        for b in builtins:
            lt, rt = term_type(b.lhs), term_type(b.rhs)
            if lt is None and rt is None and b.op in ORDER_OPS:
                lt = rt = NUM
            for t, want in ((b.lhs, rt), (b.rhs, lt)):
                if isinstance(t, Var) and types.get(t.name) is None and want is not None:
                    types[t.name] = want
                    changed = True
    for b in builtins:
        lt, rt = term_type(b.lhs), term_type(b.rhs)
        if lt != rt:
            raise TypeCheckError(f"built-in '{b}' compares {lt} with {rt}")
        if b.op in ORDER_OPS and lt != NUM:
            raise TypeCheckError(f"order comparison '{b}' needs numbers, got {lt}")
    return types


def _quantified(node):
    return node.vars if isinstance(node, (Exists, Forall)) else ()


def _check_scopes(f: Formula) -> None:
    free = set(f.free_vars)

    def go(node, bound):
        if isinstance(node, (Exists, Forall)):
            if len(set(node.vars)) != len(node.vars):
                raise TypeCheckError(f"repeated variable in quantifier {list(node.vars)}")
            for v in node.vars:
                if v in bound or v in free:
                    raise TypeCheckError(f"variable {v} is quantified again inside its own scope "
                                         "or also occurs free")
            bound = bound | set(node.vars)
        for c in children(node):
            go(c, bound)

    go(f, frozenset())


# -- fragments ---------------------------------------------------------------

class Fragment(enum.Enum):
    GROUND_QFREE = "ground-quantifier-free"
    OPEN_QFREE = "open-quantifier-free"
    SINGLE_LITERAL_EXISTENTIAL = "single-literal-existential"
    GENERAL = "general"


def _builtin_only(f: Formula) -> bool:
    return all(isinstance(n, (BuiltinAtom, Truth, Not, And, Or, Implies)) for n in walk(f))


def single_literal_form(f: Formula):
    """Split ``exists v. R(..) & phi`` into ``(vars, atom, [phi parts])``.

    Returns None unless ``f`` is a sentence of that shape where phi only
    uses built-ins and every quantified variable occurs in the atom.
    """
    if f.free_vars or not isinstance(f, Exists):
        return None
    names = []
    body = f
    while isinstance(body, Exists):
        names.extend(body.vars)
        body = body.body
    parts = list(body.parts) if isinstance(body, And) else [body]
    atoms = [p for p in parts if isinstance(p, RelAtom)]
    rest = [p for p in parts if not isinstance(p, RelAtom)]
    if len(atoms) != 1 or not all(_builtin_only(p) for p in rest):
        return None
    atom = atoms[0]
    if not set(names) <= set(term_vars(atom.terms)):
        return None
    return tuple(names), atom, rest


def fragment(f: Formula) -> Fragment:
    if f.is_quantifier_free:
        return Fragment.OPEN_QFREE if f.free_vars else Fragment.GROUND_QFREE
    if single_literal_form(f) is not None:
        return Fragment.SINGLE_LITERAL_EXISTENTIAL
    return Fragment.GENERAL


def phi_over_attributes(f: Formula, schema: Schema) -> Formula:
    """For a single-literal existential sentence, the built-in condition
    rewritten over attribute names (one variable per attribute).

    Constants and repeated variables in the atom become equations.
    """
    form = single_literal_form(f)
    if form is None:
        raise QueryError(f"not of the form exists t. R(t) & phi(t): {f}")
    _, atom, rest = form
    rename = {}
    extra = []
    for term, attr in zip(atom.terms, schema.attributes):
        here = Var(attr.name)
        if isinstance(term, Const):
            extra.append(BuiltinAtom("=", here, term))
        elif term.name in rename:
            extra.append(BuiltinAtom("=", here, rename[term.name]))
        else:
            rename[term.name] = here
    return conj(*(substitute(p, rename) for p in rest), *extra)


# -- ground CNF --------------------------------------------------------------

@dataclass(frozen=True)
class GroundClause:
    """A disjunction of ground relation literals (built-ins already folded)."""

    positives: tuple = ()
    negatives: tuple = ()

    def holds_in(self, rows) -> bool:
        return any(t in rows for t in self.positives) or any(t not in rows for t in self.negatives)

    def to_formula(self, relation: str) -> Formula:
        lits = [RelAtom(relation, tuple(map(Const, t))) for t in self.positives]
        lits += [Not(RelAtom(relation, tuple(map(Const, t)))) for t in self.negatives]
        if not lits:
            return FALSE
        return lits[0] if len(lits) == 1 else Or(tuple(lits))

    def __len__(self):
        return len(self.positives) + len(self.negatives)


def _cnf(f: Formula, negate: bool) -> set:
    # clause = frozenset of (polarity, row); returns a set of clauses
    if isinstance(f, Truth):
        return set() if f.value != negate else {frozenset()}
    if isinstance(f, BuiltinAtom):
        if not (isinstance(f.lhs, Const) and isinstance(f.rhs, Const)):
            raise QueryError(f"built-in '{f}' is not ground")
        holds = compare(f.op, f.lhs.value, f.rhs.value)
        return set() if holds != negate else {frozenset()}
    if isinstance(f, RelAtom):
        if not f.is_ground:
            raise QueryError(f"atom {f} is not ground")
        return {frozenset({(not negate, f.row())})}
    if isinstance(f, Not):
        return _cnf(f.body, not negate)
    if isinstance(f, Implies):
        return _cnf(Or((Not(f.lhs), f.rhs)), negate)
    if isinstance(f, (And, Or)):
        conjunctive = isinstance(f, And) != negate
        parts = [_cnf(p, negate) for p in f.parts]
        if conjunctive:
            return set().union(*parts)
        acc = {frozenset()}
        for clauses in parts:
            acc = {a | b for a in acc for b in clauses if not _tautology(a | b)}
        return acc
    raise QueryError(f"{type(f).__name__} is not allowed in a quantifier-free sentence")


def _tautology(clause) -> bool:
    return any((not pol, row) in clause for pol, row in clause)


def to_cnf(f: Formula) -> list:
    """Equivalent list of ground clauses.

    Ground built-ins are evaluated away, tautologies and duplicate
    literals dropped. ``[]`` means true; a clause with no literals false.
    """
    if f.free_vars or not f.is_quantifier_free:
        raise QueryError("to_cnf needs a ground quantifier-free sentence")
    clauses = [c for c in _cnf(f, False) if not _tautology(c)]
    out = {GroundClause(tuple(sort_rows(r for pol, r in c if pol)),
                        tuple(sort_rows(r for pol, r in c if not pol))) for c in clauses}
    return sorted(out, key=lambda c: ([row_key(r) for r in c.positives],
                                      [row_key(r) for r in c.negatives]))


# -- evaluation --------------------------------------------------------------

def _conjuncts(f):
    return f.parts if isinstance(f, And) else (f,)


class Evaluator:
    """Active-domain evaluator for one formula over one base instance.

    ``evaluate`` takes a membership test so the same evaluator serves the
    instance itself, each of its repairs (subsets) and partially decided
    repairs, where membership may be unknown (``None``) and the result
    follows three-valued (Kleene) logic. Membership must be false for rows
    outside the base instance.

    Quantified variables range over the typed active domain of the base
    instance plus the formula's constants. A quantifier whose body is
    guarded by a relation atom (``exists v. R(..) & ..`` or
    ``forall v. R(..) -> ..``) enumerates only matching rows of the base
    instance; this is the same semantics, just faster.
    """

    def __init__(self, f: Formula, base: Instance, extra_domain=()):
        self.formula = f
        self.schema = base.schema
        self.var_types = check_query(f, base.schema)
        self.index = TupleIndex(base.tuples)
        values = {v for row in base.tuples for v in row} | constants(f) | set(extra_domain)
        ordered = sorted(values, key=value_key)
        self.domain = {
            SYM: [v for v in ordered if isinstance(v, str)],
            NUM: [v for v in ordered if isinstance(v, int)],
            None: ordered,
        }
        self._plans = {}

    def evaluate(self, member, binding=None):
        binding = dict(binding or {})
        missing = [v for v in self.formula.free_vars if v not in binding]
        if missing:
            raise QueryError(f"unbound free variable(s) {missing}")
        self._member = member
        return self._ev(self.formula, binding)

    def _ev(self, f, env):
        t = type(f)
        if t is RelAtom:
            return self._member(tuple(x.value if type(x) is Const else env[x.name] for x in f.terms))
        if t is BuiltinAtom:
            lhs = f.lhs.value if type(f.lhs) is Const else env[f.lhs.name]
            rhs = f.rhs.value if type(f.rhs) is Const else env[f.rhs.name]
            return compare(f.op, lhs, rhs)
        if t is And:
            result = True
            for p in f.parts:
                v = self._ev(p, env)
                if v is False:
                    return False
                if v is None:
                    result = None
            return result
        if t is Or:
            result = False
            for p in f.parts:
                v = self._ev(p, env)
                if v is True:
                    return True
                if v is None:
                    result = None
            return result
        if t is Not:
            v = self._ev(f.body, env)
            return None if v is None else not v
        if t is Implies:
            a = self._ev(f.lhs, env)
            if a is False:
                return True
            b = self._ev(f.rhs, env)
            if b is True:
                return True
            return False if (a is True and b is False) else None
        if t is Truth:
            return f.value
        if t is Exists:
            result = False
            for env2 in self._bindings(f, env):
                v = self._ev(f.body, env2)
                if v is True:
                    return True
                if v is None:
                    result = None
            return result
        if t is Forall:
            result = True
            for env2 in self._bindings(f, env):
                v = self._ev(f.body, env2)
                if v is False:
                    return False
                if v is None:
                    result = None
            return result
        raise TypeError(f"not a formula: {f!r}")

    def _plan(self, f):
        plan = self._plans.get(id(f))
        if plan is None:
            qvars = set(f.vars)
            if isinstance(f, Exists):
                candidates = [p for p in _conjuncts(f.body) if isinstance(p, RelAtom)]
            else:
                candidates = []
                if isinstance(f.body, Implies):
                    candidates = [p for p in _conjuncts(f.body.lhs) if isinstance(p, RelAtom)]
                elif isinstance(f.body, Or):
                    candidates = [p.body for p in f.body.parts
                                  if isinstance(p, Not) and isinstance(p.body, RelAtom)]
            guard = max(candidates, key=lambda a: len(qvars & set(term_vars(a.terms))),
                        default=None)
            covered = set(term_vars(guard.terms)) & qvars if guard is not None else set()
            if not covered:
                guard = None
            free = [v for v in f.vars if v not in covered]
            plan = (guard, free, [self.domain[self.var_types.get(v)] for v in free])
            self._plans[id(f)] = plan
        return plan

    def _bindings(self, f, env):
        guard, free, domains = self._plan(f)
        if guard is None:
            bases = (env,)
        else:
            bases = self._guard_matches(guard.terms, env)
        for base in bases:
            if not free:
                yield base
                continue
            for values in itertools.product(*domains):
                env2 = dict(base)
                env2.update(zip(free, values))
                yield env2

    def _guard_matches(self, pattern, env):
        positions, key = [], []
        for p, t in enumerate(pattern):
            if type(t) is Const:
                positions.append(p)
                key.append(t.value)
            elif t.name in env:
                positions.append(p)
                key.append(env[t.name])
        key = key[0] if len(key) == 1 else tuple(key)
        for row in self.index.lookup(tuple(positions), key):
            b = match(pattern, row, env)
            if b is not None:
                yield b


def eval_fo(instance: Instance, f: Formula, binding=None, domain=()) -> bool:
    """Truth of ``f`` in ``instance`` under ``binding`` (active-domain semantics).

    ``domain`` adds values to the quantification range.
    """
    rows = instance.tuples
    return Evaluator(f, instance, domain).evaluate(rows.__contains__, binding)


def ground(f: Formula, subst: dict, schema: Schema | None = None) -> Formula:
    """Substitute values for the free variables of ``f``."""
    missing = [v for v in f.free_vars if v not in subst]
    if missing:
        raise QueryError(f"substitution leaves {missing} unbound")
    out = substitute(f, {k: v if isinstance(v, (Var, Const)) else Const(v)
                         for k, v in subst.items() if k in f.free_vars})
    if schema is not None:
        check_query(out, schema)
    return out


def candidate_bindings(instance: Instance, f: Formula) -> list:
    """Candidate answer tuples for the free variables of ``f``.

    Variables that a positive atom pins (through conjunctions and
    existentials) take values from joining those atoms with the instance.
    A binding outside that join is false in every repair, so it can never
    be a consistent answer. Remaining variables range over the typed
    active domain plus the query constants.
    """
    free = f.free_vars
    if not free:
        return [()]
    types = check_query(f, instance.schema)
    counter = itertools.count()
    guards = _guard_atoms(f, counter)
    ordered = sorted({v for row in instance.tuples for v in row} | constants(f), key=value_key)
    domain = {SYM: [v for v in ordered if isinstance(v, str)],
              NUM: [v for v in ordered if isinstance(v, int)], None: ordered}
    pinned = [v for v in free if any(v in term_vars(g.terms) for g in guards)]
    rest = [v for v in free if v not in pinned]
    if pinned:
        matcher = Matcher([g.terms for g in guards])
        partial = {tuple(b[v] for v in pinned)
                   for b, _ in matcher.solutions(TupleIndex(instance.tuples))}
    else:
        partial = {()}
    out = set()
    for head in partial:
        for tail in itertools.product(*(domain[types.get(v)] for v in rest)):
            b = dict(zip(pinned, head))
            b.update(zip(rest, tail))
            out.add(tuple(b[v] for v in free))
    return sorted(out, key=row_key)


def _guard_atoms(f: Formula, counter) -> list:
    if isinstance(f, RelAtom):
        return [f]
    if isinstance(f, And):
        return [g for p in f.parts for g in _guard_atoms(p, counter)]
    if isinstance(f, Exists):
        fresh = {v: Var(f"?{next(counter)}") for v in f.vars}
        return _guard_atoms(substitute(f.body, fresh), counter)
    return []


__all__ = [
    "Fragment", "GroundClause", "Evaluator", "parse_query", "check_query", "fragment",
    "single_literal_form", "phi_over_attributes", "to_cnf", "eval_fo", "ground",
    "candidate_bindings",
]
