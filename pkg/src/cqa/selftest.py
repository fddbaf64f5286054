"""Random case generators and the differential suites that compare each
polynomial path (and each reduction) against exhaustive ground truth."""

from __future__ import annotations

import itertools
import random
import time
from dataclasses import dataclass, field

from .conflict import LAZY, build_hypergraph
from .constraints import FD, ConstraintSet, DenialConstraint, is_consistent
from .engine import qfree_consistent_true, rewrite_single_fd
from .model import NUM, SYM, Instance, Schema
from .oracle import AnswerStatus, enumerate_repairs, exists_falsifying_repair, oracle_status
from .queries import eval_fo, parse_query, phi_over_attributes
from .reductions import (CnfFormula, Graph, brute_3col, brute_sat, gen_3col, gen_3sat_yfree,
                         gen_monotone3sat)
from .syntax import BuiltinAtom, Const, RelAtom, Var, format_constant

SCHEMA = Schema.of("R", A="sym", B="sym", C="num")
SYMS = ("a", "b", "c", "d")
NUMS = (0, 1, 2, 3)
EQ_OPS = ("=", "!=")
ALL_OPS = ("=", "!=", "<", ">", "<=", ">=")


# -- generators ----------------------------------------------------------------

def _values(kind, domain_size):
    return (SYMS if kind == SYM else NUMS)[:domain_size]


def random_instance(rng: random.Random, schema: Schema = SCHEMA, max_tuples: int = 10,
                    domain_size: int = 4) -> Instance:
    n = rng.randint(0, max_tuples)
    pools = [_values(t, domain_size) for t in schema.types]
    return Instance(schema, [tuple(rng.choice(p) for p in pools) for _ in range(n)])


def random_denial(rng: random.Random, schema: Schema = SCHEMA, max_literals: int = 3,
                  domain_size: int = 4) -> DenialConstraint:
    """A random well-typed safe denial.

    Most are key-shaped (every position either shared by all literals or
    fresh in each); the rest draw variables from small per-type pools with
    the odd constant. Built-ins
    lean towards ``!=`` between variables, which is what makes denials
    conflict pairs of tuples rather than drop single ones.
    """
    count = rng.randint(min(2, max_literals), max_literals)
    literals, seen = [], {SYM: [], NUM: []}
    if rng.random() < 0.6:
        # key-shaped: each position is shared by all literals or fresh in each
        shared = [rng.random() < 0.5 for _ in schema.types]
        split = rng.randrange(len(shared))
        shared[split] = False
        for k in range(count):
            terms = []
            for i, kind in enumerate(schema.types):
                name = f"v{i}" if shared[i] else f"v{i}_{k}"
                if name not in seen[kind]:
                    seen[kind].append(name)
                terms.append(Var(name))
            literals.append(RelAtom(schema.relation, tuple(terms)))
        builtins = [BuiltinAtom("!=", Var(f"v{split}_0"), Var(f"v{split}_1"))]
    else:
        builtins = []
        pool = {SYM: ["x", "y", "z"], NUM: ["m", "n", "k"]}
        for _ in range(count):
            terms = []
            for kind in schema.types:
                if rng.random() < 0.1:
                    terms.append(Const(rng.choice(_values(kind, domain_size))))
                else:
                    name = rng.choice(pool[kind])
                    if name not in seen[kind]:
                        seen[kind].append(name)
                    terms.append(Var(name))
            literals.append(RelAtom(schema.relation, tuple(terms)))
    for _ in range(rng.randint(0, 2 - len(builtins))):
        kinds = [k for k in (SYM, NUM) if seen[k]]
        if not kinds:
            break
        kind = rng.choice(kinds)
        lhs = Var(rng.choice(seen[kind]))
        if rng.random() < 0.7 and len(seen[kind]) > 1:
            rhs = Var(rng.choice([v for v in seen[kind] if v != lhs.name]))
            op = "!=" if rng.random() < 0.6 else rng.choice(EQ_OPS if kind == SYM else ALL_OPS)
        else:
            rhs = Const(rng.choice(_values(kind, domain_size)))
            op = rng.choice(EQ_OPS if kind == SYM else ALL_OPS)
        builtins.append(BuiltinAtom(op, lhs, rhs))
    return DenialConstraint(tuple(literals), tuple(builtins))


def random_fd(rng: random.Random, schema: Schema = SCHEMA) -> FD:
    names = list(schema.names)
    rng.shuffle(names)
    split = rng.randint(0, len(names) - 1)
    rest = names[split:]
    rhs = rest[:rng.randint(1, len(rest))]
    return FD(tuple(sorted(names[:split], key=schema.position)),
              tuple(sorted(rhs, key=schema.position)))


def _random_row(rng, schema, domain_size):
    return tuple(rng.choice(_values(t, domain_size)) for t in schema.types)


def _atom_text(schema, row):
    return f"{schema.relation}({', '.join(format_constant(v) for v in row)})"


def random_ground_sentence(rng: random.Random, instance: Instance, max_clauses: int = 3,
                           max_literals: int = 3, domain_size: int = 4) -> str:
    """Text of a random ground CNF; atoms mostly name tuples of ``instance``."""
    schema = instance.schema
    rows = instance.rows
    clauses = []
    for _ in range(rng.randint(1, max_clauses)):
        lits = []
        for _ in range(rng.randint(1, max_literals)):
            if rng.random() < 0.08:
                a, b = rng.sample(NUMS, 2)
                lits.append(f"{a} {rng.choice(ALL_OPS)} {b}")
                continue
            if rows and rng.random() < 0.8:
                row = rng.choice(rows)
            else:
                row = _random_row(rng, schema, domain_size)
            lits.append(("!" if rng.random() < 0.5 else "") + _atom_text(schema, row))
        clauses.append("(" + " | ".join(lits) + ")")
    return " & ".join(clauses)


def random_phi(rng: random.Random, schema: Schema = SCHEMA, domain_size: int = 4) -> str:
    """Text of a random built-in condition over the attribute names."""
    def comparison():
        i = rng.randrange(schema.arity)
        attr = schema.attributes[i]
        same = [a.name for a in schema.attributes if a.type == attr.type and a.name != attr.name]
        if same and rng.random() < 0.3:
            rhs = rng.choice(same)
        else:
            rhs = format_constant(rng.choice(_values(attr.type, domain_size)))
        ops = ALL_OPS if attr.type == NUM else EQ_OPS
        return f"{attr.name} {rng.choice(ops)} {rhs}"

    parts = [comparison() for _ in range(rng.randint(1, 3))]
    text = parts[0]
    for p in parts[1:]:
        text = f"({text} {rng.choice(('&', '|'))} {p})"
    if rng.random() < 0.2:
        text = f"!{text}"
    return text


def random_cnf(rng: random.Random, max_vars: int = 5, max_clauses: int = 6,
               monotone: bool = False) -> CnfFormula:
    n = rng.randint(1, max_vars)
    clauses = []
    for _ in range(rng.randint(1, max_clauses)):
        chosen = rng.sample(range(1, n + 1), rng.randint(1, min(3, n)))
        if monotone:
            sign = rng.choice((1, -1))
            clauses.append(tuple(sign * v for v in chosen))
        else:
            clauses.append(tuple(v if rng.random() < 0.5 else -v for v in chosen))
    return CnfFormula(tuple(f"p{i}" for i in range(1, n + 1)), tuple(clauses))


def two_choice_family(n: int):
    """``R(A, B)`` holding ``(a_i, b0)`` and ``(a_i, b1)`` for i = 1..n under
    ``A -> B``: 2n tuples, n disjoint conflicts, 2**n repairs."""
    schema = Schema.of("R", A="sym", B="sym")
    rows = [(f"a{i}", f"b{j}") for i in range(1, n + 1) for j in (0, 1)]
    return Instance(schema, rows), ConstraintSet(schema, (FD(("A",), ("B",)),))


def all_graphs(max_nodes: int):
    """Every labelled simple graph on 0..max_nodes nodes."""
    for n in range(max_nodes + 1):
        nodes = tuple(str(i) for i in range(1, n + 1))
        pairs = list(itertools.combinations(nodes, 2))
        for mask in range(2 ** len(pairs)):
            yield Graph(nodes, tuple(p for k, p in enumerate(pairs) if mask >> k & 1))


def powerset_repairs(instance: Instance, cs: ConstraintSet) -> set:
    """Repairs by definition: maximal consistent subsets, found by trying
    every subset. Only for tiny instances."""
    rows = instance.rows
    consistent = []
    for mask in range(2 ** len(rows)):
        subset = instance.subset(r for k, r in enumerate(rows) if mask >> k & 1)
        if is_consistent(subset, cs):
            consistent.append(frozenset(subset.tuples))
    return {s for s in consistent if not any(s < t for t in consistent)}


# -- suites --------------------------------------------------------------------

@dataclass
class SuiteReport:
    name: str
    cases: int = 0
    agreed: int = 0
    seconds: float = 0.0
    failures: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.cases > 0 and self.agreed == self.cases

    def record(self, ok: bool, detail) -> None:
        self.cases += 1
        if ok:
            self.agreed += 1
        elif len(self.failures) < 5:
            self.failures.append(detail)

    def to_json(self, timings: bool = False) -> dict:
        out = {"suite": self.name, "cases": self.cases, "agreed": self.agreed,
               "passed": self.passed, "failures": [str(f) for f in self.failures]}
        if timings:
            out["seconds"] = round(self.seconds, 3)
        return out


def _timed(fn):
    def run(*args, **kwargs):
        started = time.perf_counter()
        report = fn(*args, **kwargs)
        report.seconds = time.perf_counter() - started
        return report
    run.__name__ = fn.__name__
    run.__doc__ = fn.__doc__
    return run


@_timed
def qfree_suite(cases: int = 200, seed: int = 0) -> SuiteReport:
    """Ground quantifier-free engine vs. repair enumeration."""
    rng = random.Random(seed)
    report = SuiteReport("qfree")
    for _ in range(cases):
        instance = random_instance(rng, max_tuples=10)
        cs = ConstraintSet(SCHEMA, (), tuple(random_denial(rng) for _ in range(rng.randint(1, 2))))
        text = random_ground_sentence(rng, instance)
        sentence = parse_query(text, SCHEMA)
        fast = qfree_consistent_true(instance, cs, sentence, build_hypergraph(instance, cs, LAZY))
        slow = oracle_status(instance, cs, sentence) is AnswerStatus.CONSISTENTLY_TRUE
        report.record(fast == slow, (instance.rows, cs.to_dsl(), text, fast, slow))
    return report


@_timed
def rewrite_suite(cases: int = 200, seed: int = 0) -> SuiteReport:
    """First-order rewriting under one FD vs. repair enumeration."""
    rng = random.Random(seed)
    report = SuiteReport("rewrite")
    names = ", ".join(SCHEMA.names)
    for _ in range(cases):
        instance = random_instance(rng, max_tuples=12)
        fd = random_fd(rng)
        cs = ConstraintSet(SCHEMA, (fd,))
        text = f"exists {names}. R({names}) & {random_phi(rng)}"
        query = parse_query(text, SCHEMA)
        rewritten = rewrite_single_fd(fd, SCHEMA, phi_over_attributes(query, SCHEMA))
        fast = eval_fo(instance, rewritten)
        slow = oracle_status(instance, cs, query) is AnswerStatus.CONSISTENTLY_TRUE
        report.record(fast == slow, (instance.rows, str(fd), text, fast, slow))
    return report


@_timed
def reductions_suite(cases: int = 50, seed: int = 0, max_graph_nodes: int = 3) -> SuiteReport:
    """Each generator: brute-force verdict iff a falsifying repair exists."""
    rng = random.Random(seed)
    report = SuiteReport("reductions")
    for _ in range(cases):
        f = random_cnf(rng, monotone=True)
        verdict = exists_falsifying_repair(*gen_monotone3sat(f))
        report.record(verdict == brute_sat(f), ("monotone3sat", f))
    for _ in range(cases):
        f = random_cnf(rng)
        verdict = exists_falsifying_repair(*gen_3sat_yfree(f))
        report.record(verdict == brute_sat(f), ("yfree", f))
    for h in all_graphs(max_graph_nodes):
        verdict = exists_falsifying_repair(*gen_3col(h))
        report.record(verdict == brute_3col(h), ("threecol", h))
    return report


@_timed
def structure_suite(cases: int = 100, seed: int = 0) -> SuiteReport:
    """Enumerated repairs vs. maximal consistent subsets, and lazy vs.
    materialized hypergraph answers."""
    rng = random.Random(seed)
    report = SuiteReport("structure")
    for _ in range(cases):
        instance = random_instance(rng, max_tuples=12)
        cs = ConstraintSet(SCHEMA, (), tuple(random_denial(rng) for _ in range(rng.randint(1, 2))))
        hg = build_hypergraph(instance, cs)
        enumerated = list(enumerate_repairs(hg))
        ok = len(enumerated) == len(set(enumerated)) and set(enumerated) == powerset_repairs(instance, cs)
        lazy = build_hypergraph(instance, cs, LAZY)
        ok = ok and all(lazy.edges_containing(t) == hg.edges_containing(t) for t in instance.rows)
        sample = [r for r in instance.rows if rng.random() < 0.5]
        ok = ok and lazy.is_independent(sample) == hg.is_independent(sample)
        report.record(ok, (instance.rows, cs.to_dsl()))
    return report


SUITES = {
    "qfree": qfree_suite,
    "rewrite": rewrite_suite,
    "reductions": reductions_suite,
    "structure": structure_suite,
}


def run_all(seed: int = 0, names=None) -> list:
    return [SUITES[n](seed=seed) for n in (names or SUITES)]


__all__ = [
    "SCHEMA", "random_instance", "random_denial", "random_fd", "random_ground_sentence",
    "random_phi", "random_cnf", "two_choice_family", "all_graphs", "powerset_repairs", "SuiteReport",
    "qfree_suite", "rewrite_suite", "reductions_suite", "structure_suite", "SUITES", "run_all",
]
