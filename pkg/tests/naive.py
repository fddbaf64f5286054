"""Slow reference implementations sharing no code with the package's
join machinery: every literal-to-tuple assignment is tried."""

import itertools

from cqa.syntax import Const, compare


def _unify(literals, chosen):
    env = {}
    for lit, row in zip(literals, chosen):
        for term, value in zip(lit.terms, row):
            if isinstance(term, Const):
                if term.value != value or type(term.value) is not type(value):
                    return None
            elif env.setdefault(term.name, value) != value or type(env[term.name]) is not type(value):
                return None
    return env


def _value(term, env):
    return term.value if isinstance(term, Const) else env[term.name]


def naive_violations(rows, c):
    out = set()
    for chosen in itertools.product(list(rows), repeat=len(c.literals)):
        env = _unify(c.literals, chosen)
        if env is None:
            continue
        if all(compare(b.op, _value(b.lhs, env), _value(b.rhs, env)) for b in c.builtins):
            out.add(frozenset(chosen))
    return out


def naive_edges(rows, cs):
    return set().union(*(naive_violations(rows, c) for c in cs.all_denials)) if cs.all_denials else set()


def fd_holds(rows, schema, fd):
    """Textbook FD satisfaction."""
    lhs = [schema.position(a) for a in fd.lhs]
    rhs = [schema.position(a) for a in fd.rhs]
    seen = {}
    for r in rows:
        key = tuple(r[i] for i in lhs)
        val = tuple(r[i] for i in rhs)
        if seen.setdefault(key, val) != val:
            return False
    return True
