"""Polynomial-time consistent answers: ground quantifier-free queries under
any denial constraints, and single-atom existential queries under one FD
by first-order rewriting. ``cqa_answer`` dispatches between these and the
exact oracle."""

from __future__ import annotations

import time
from dataclasses import dataclass, field

from .conflict import LAZY, MATERIALIZED, ConflictHypergraph, build_hypergraph
from .constraints import FD, ConstraintSet
from .errors import QueryError, StrategyError, TypeCheckError
from .model import Instance, Schema, row_key
from .oracle import DEFAULT_NODE_BUDGET, AnswerStatus, count_repairs, oracle_answers, oracle_status
from .queries import (Fragment, GroundClause, candidate_bindings, check_query, eval_fo,
                      fragment, ground, phi_over_attributes, to_cnf)
from .syntax import (Exists, Forall, Formula, Implies, Not, RelAtom, Var, conj,
                     substitute, walk)

STRATEGIES = ("auto", "qfree", "rewrite", "oracle")


# -- ground quantifier-free queries ------------------------------------------

def refutation_core(hg: ConflictHypergraph, clause: GroundClause):
    """The set ``r'`` that starts a repair falsifying ``clause``, or None.

    ``r'`` holds every tuple the clause negates, plus, for each tuple the
    clause asserts that is present, one edge through it minus the tuple
    itself. The edge choice is searched exhaustively, smallest incidence
    list first; its depth is bounded by the clause length.
    """
    rows = hg.instance.tuples
    required = frozenset(clause.negatives)
    if not required <= rows or required & set(clause.positives):
        return None
    if not hg.is_independent(required):
        return None
    choices = []
    for t in clause.positives:
        if t not in rows:
            continue  # absent tuples are false in every repair
        edges = hg.edges_containing(t)
        if not edges:
            return None  # t is in every repair
        choices.append((t, edges))
    choices.sort(key=lambda c: len(c[1]))

    def search(k, current):
        if k == len(choices):
            return current
        t, edges = choices[k]
        for e in edges:
            nxt = current | (e - {t})
            if nxt is current or hg.is_independent(nxt):
                found = search(k + 1, nxt)
                if found is not None:
                    return found
        return None

    return search(0, required)


def clause_refutable(hg: ConflictHypergraph, clause: GroundClause) -> bool:
    """Whether some repair falsifies the ground clause."""
    return refutation_core(hg, clause) is not None


def refuting_repair(hg: ConflictHypergraph, clause: GroundClause):
    """A concrete repair falsifying ``clause``, or None."""
    core = refutation_core(hg, clause)
    return None if core is None else hg.extend_to_maximal(core)


def _qfree_hypergraph(instance, cs, hg):
    return hg if hg is not None else build_hypergraph(instance, cs, LAZY)


def qfree_consistent_true(instance: Instance, cs: ConstraintSet, sentence: Formula,
                          hg: ConflictHypergraph | None = None) -> bool:
    """True iff the ground quantifier-free ``sentence`` holds in every repair."""
    if sentence.free_vars or not sentence.is_quantifier_free:
        raise QueryError("expected a ground quantifier-free sentence")
    hg = _qfree_hypergraph(instance, cs, hg)
    return not any(clause_refutable(hg, c) for c in to_cnf(sentence))


def qfree_status(instance, cs, sentence, hg=None) -> AnswerStatus:
    hg = _qfree_hypergraph(instance, cs, hg)
    if qfree_consistent_true(instance, cs, sentence, hg):
        return AnswerStatus.CONSISTENTLY_TRUE
    if qfree_consistent_true(instance, cs, Not(sentence), hg):
        return AnswerStatus.CONSISTENTLY_FALSE
    return AnswerStatus.UNDETERMINED


def qfree_consistent_answers(instance: Instance, cs: ConstraintSet, query: Formula,
                             hg: ConflictHypergraph | None = None) -> set:
    """Consistent answers to a quantifier-free query with free variables."""
    if not query.is_quantifier_free:
        raise QueryError("expected a quantifier-free query")
    hg = _qfree_hypergraph(instance, cs, hg)
    names = query.free_vars
    out = set()
    for values in candidate_bindings(instance, query):
        sentence = ground(query, dict(zip(names, values)))
        if qfree_consistent_true(instance, cs, sentence, hg):
            out.add(values)
    return out


# -- single FD rewriting -----------------------------------------------------

def rewrite_single_fd(fd: FD, schema: Schema, phi: Formula) -> Formula:
    """Sentence that holds in an instance iff ``exists t. R(t) & phi(t)``
    holds in every repair under the single FD.

    ``phi`` is a built-in-only condition whose variables are attribute
    names. With X the FD's left side, Y its right side and Z the rest::

        exists x,y,z. forall y1,z1. exists z2.
            R(x,y,z) & phi(x,y,z) & (R(x,y1,z1) -> R(x,y1,z2) & phi(x,y1,z2))

    Variables are placed by attribute position, so the atoms follow the
    schema's column order whatever the FD.
    """
    fd.check(schema)
    if any(isinstance(n, RelAtom) for n in walk(phi)):
        raise QueryError("phi may only use built-in predicates")
    if not phi.is_quantifier_free:
        raise QueryError("phi must be quantifier-free")
    unknown = [v for v in phi.free_vars if v not in schema.names]
    if unknown:
        raise QueryError(f"phi mentions {unknown}, which are not attributes of {schema.relation}")
    role = {}
    for a in schema.names:
        role[a] = "x" if a in fd.lhs else "y" if a in fd.rhs else "z"

    def vec(y_prefix, z_prefix):
        names = []
        for a in schema.names:
            r = role[a]
            names.append(f"x_{a}" if r == "x" else f"{y_prefix}_{a}" if r == "y" else f"{z_prefix}_{a}")
        return names

    def atom(names):
        return RelAtom(schema.relation, tuple(Var(n) for n in names))

    def phi_at(names):
        return substitute(phi, {a: Var(n) for a, n in zip(schema.names, names)})

    outer = vec("y", "z")
    other = vec("y1", "z1")
    witness = vec("y1", "z2")
    xs = [f"x_{a}" for a in schema.names if role[a] == "x"]
    ys = [f"y_{a}" for a in schema.names if role[a] == "y"]
    zs = [f"z_{a}" for a in schema.names if role[a] == "z"]
    y1s = [f"y1_{a}" for a in schema.names if role[a] == "y"]
    z1s = [f"z1_{a}" for a in schema.names if role[a] == "z"]
    z2s = [f"z2_{a}" for a in schema.names if role[a] == "z"]

    body = conj(atom(outer), phi_at(outer),
                Implies(atom(other), conj(atom(witness), phi_at(witness))))
    if z2s:
        body = Exists(tuple(z2s), body)
    body = Forall(tuple(y1s + z1s), body)
    rewritten = Exists(tuple(xs + ys + zs), body)
    try:
        check_query(rewritten, schema)
    except TypeCheckError as e:
        raise QueryError(f"phi is not well-typed for {schema}: {e}") from None
    return rewritten


# -- dispatcher --------------------------------------------------------------

@dataclass
class CQAResult:
    strategy: str
    fragment: Fragment
    free_vars: tuple = ()
    status: AnswerStatus | None = None
    answers: list | None = None
    stats: dict = field(default_factory=dict)

    def to_json(self, timings: bool = False) -> dict:
        out = {"strategy": self.strategy, "fragment": self.fragment.value}
        if self.status is not None:
            out["status"] = self.status.value
        if self.answers is not None:
            out["free_vars"] = list(self.free_vars)
            out["answers"] = [list(a) for a in self.answers]
        stats = dict(self.stats)
        if not timings:
            stats.pop("seconds", None)
        out["stats"] = stats
        return out


def choose_strategy(query: Formula, cs: ConstraintSet) -> str:
    frag = fragment(query)
    if frag in (Fragment.GROUND_QFREE, Fragment.OPEN_QFREE):
        return "qfree"
    if frag is Fragment.SINGLE_LITERAL_EXISTENTIAL and cs.single_fd is not None:
        return "rewrite"
    return "oracle"


def cqa_answer(instance: Instance, cs: ConstraintSet, query: Formula, strategy: str = "auto",
               budget: int = DEFAULT_NODE_BUDGET, edge_budget: int | None = None) -> CQAResult:
    """Consistent answer(s) to ``query``: a status for sentences, the set of
    consistent answer tuples otherwise."""
    if strategy not in STRATEGIES:
        raise StrategyError(f"unknown strategy {strategy!r}; pick one of {STRATEGIES}")
    check_query(query, instance.schema)
    frag = fragment(query)
    if strategy == "auto":
        strategy = choose_strategy(query, cs)
    started = time.perf_counter()
    result = CQAResult(strategy, frag, query.free_vars)
    stats = {"tuples": len(instance)}
    hg_args = {} if edge_budget is None else {"edge_budget": edge_budget}

    if strategy == "qfree":
        if not query.is_quantifier_free:
            raise StrategyError(f"the qfree strategy needs a quantifier-free query ({frag.value} given)")
        hg = build_hypergraph(instance, cs, LAZY)
        if query.free_vars:
            result.answers = sorted(qfree_consistent_answers(instance, cs, query, hg), key=row_key)
        else:
            stats["clauses"] = len(to_cnf(query))
            result.status = qfree_status(instance, cs, query, hg)
    elif strategy == "rewrite":
        fd = cs.single_fd
        if frag is not Fragment.SINGLE_LITERAL_EXISTENTIAL or fd is None:
            raise StrategyError("the rewrite strategy needs a query exists t. R(t) & phi(t) "
                                "and exactly one functional dependency")
        rewritten = rewrite_single_fd(fd, instance.schema, phi_over_attributes(query, instance.schema))
        stats["rewritten"] = str(rewritten)
        if eval_fo(instance, rewritten):
            result.status = AnswerStatus.CONSISTENTLY_TRUE
        elif not eval_fo(instance, query):
            # under one FD every tuple belongs to some repair
            result.status = AnswerStatus.CONSISTENTLY_FALSE
        else:
            result.status = AnswerStatus.UNDETERMINED
    else:
        hg = build_hypergraph(instance, cs, MATERIALIZED, **hg_args)
        stats["edges"] = len(hg.edges)
        stats["repairs"] = count_repairs(hg, budget)
        if query.free_vars:
            result.answers = sorted(oracle_answers(instance, cs, query, budget, hg), key=row_key)
        else:
            result.status = oracle_status(instance, cs, query, budget, hg)
    stats["seconds"] = round(time.perf_counter() - started, 6)
    result.stats = stats
    return result


__all__ = [
    "STRATEGIES", "CQAResult", "refutation_core", "clause_refutable", "refuting_repair",
    "qfree_consistent_true", "qfree_status", "qfree_consistent_answers",
    "rewrite_single_fd", "choose_strategy", "cqa_answer",
]
