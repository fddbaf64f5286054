"""Exact, exponential-time ground truth: repair enumeration and
repair-by-repair consistent answers.

Everything here is exact or raises ``BudgetExceeded``; nothing samples or
times out into an answer.
"""

from __future__ import annotations

import enum

from .conflict import LAZY, ConflictHypergraph, build_hypergraph
from .errors import BudgetExceeded, QueryError
from .queries import Evaluator, candidate_bindings

DEFAULT_NODE_BUDGET = 2**20

_IN, _OUT, _UNDECIDED = 1, 0, -1


class AnswerStatus(enum.Enum):
    CONSISTENTLY_TRUE = "consistently-true"
    CONSISTENTLY_FALSE = "consistently-false"
    UNDETERMINED = "undetermined"


class RepairSearch:
    """Backtracking over vertices in canonical order, each either included
    or excluded, yielding every maximal independent set exactly once.

    Including a vertex is allowed when no edge becomes fully included.
    Excluding one is allowed while some edge through it can still end up
    with all its other vertices included (the vertex stays blockable);
    excluding also rechecks earlier excluded neighbours. Leaves are
    verified maximal before being yielded.

    ``prune(member)`` may cut a subtree; ``member(row)`` answers True, False
    or None (undecided) for the current partial assignment.
    """

    def __init__(self, rows, edges, budget: int = DEFAULT_NODE_BUDGET, prune=None):
        self.rows = list(rows)
        self.position = {t: i for i, t in enumerate(self.rows)}
        self.incidence = [[] for _ in self.rows]
        for e in edges:
            members = tuple(sorted(self.position[t] for t in e))
            for i in members:
                self.incidence[i].append(members)
        self.budget = budget
        self.prune = prune
        self.nodes = 0
        self.state = [_UNDECIDED] * len(self.rows)

    def member(self, row):
        i = self.position.get(row)
        if i is None:
            return False
        s = self.state[i]
        return None if s == _UNDECIDED else s == _IN

    def _can_include(self, i):
        state = self.state
        return not any(all(state[j] == _IN for j in e if j != i) for e in self.incidence[i])

    def _blockable(self, u):
        state = self.state
        return any(all(state[j] != _OUT for j in e if j != u) for e in self.incidence[u])

    def _can_exclude(self, i):
        if not self._blockable(i):
            return False
        for e in self.incidence[i]:
            for u in e:
                if u != i and self.state[u] == _OUT and not self._blockable(u):
                    return False
        return True

    def _is_maximal(self):
        state = self.state
        return all(
            any(all(state[k] == _IN for k in e if k != j) for e in self.incidence[j])
            for j, s in enumerate(state) if s == _OUT)

    def __iter__(self):
        n = len(self.rows)
        state = self.state
        stack = [[0, 0]]
        while stack:
            frame = stack[-1]
            i = frame[0]
            if frame[1] == 0:
                self.nodes += 1
                if self.nodes > self.budget:
                    raise BudgetExceeded(f"repair search visited more than {self.budget} nodes")
                if self.prune is not None and self.prune(self.member):
                    stack.pop()
                    continue
                if i == n:
                    if self._is_maximal():
                        yield frozenset(t for t, s in zip(self.rows, state) if s == _IN)
                    stack.pop()
                    continue
                frame[1] = 1
                if self._can_include(i):
                    state[i] = _IN
                    stack.append([i + 1, 0])
                    continue
            if frame[1] == 1:
                frame[1] = 2
                state[i] = _OUT
                if self._can_exclude(i):
                    stack.append([i + 1, 0])
                    continue
            state[i] = _UNDECIDED
            stack.pop()


def _hypergraph(instance, cs, hg):
    if hg is not None:
        return hg
    return build_hypergraph(instance, cs)


def enumerate_repairs(hg: ConflictHypergraph, budget: int = DEFAULT_NODE_BUDGET):
    """Stream every repair (maximal independent set) exactly once."""
    if hg.mode == LAZY:
        hg = build_hypergraph(hg.instance, hg.constraints)
    return iter(RepairSearch(hg.vertices, hg.edges, budget))


def count_repairs(hg: ConflictHypergraph, budget: int = DEFAULT_NODE_BUDGET) -> int:
    """Number of repairs, as the product of the per-component counts.

    A repair picks a maximal independent set in every connected component
    independently, so only the components are enumerated.
    """
    edges = hg.edges
    by_vertex = {}
    for e in edges:
        for t in e:
            by_vertex.setdefault(t, set()).add(e)
    total = 1
    spent = 0
    for component in hg.components():
        if len(component) == 1 and not by_vertex.get(component[0]):
            continue
        comp_edges = {e for t in component for e in by_vertex.get(t, ())}
        search = RepairSearch(component, comp_edges, budget - spent)
        count = sum(1 for _ in search)
        spent += search.nodes
        total *= count
    return total


def find_falsifying_repair(instance, cs, sentence, budget: int = DEFAULT_NODE_BUDGET, hg=None):
    """A repair in which ``sentence`` is false, or None.

    Subtrees where the sentence already holds under every completion
    (three-valued evaluation of the partial repair) are pruned; the search
    is otherwise exhaustive, so None is a proof that no such repair exists.
    """
    if sentence.free_vars:
        raise QueryError(f"expected a sentence, found free variables {list(sentence.free_vars)}")
    hg = _hypergraph(instance, cs, hg)
    if hg.mode == LAZY:
        hg = build_hypergraph(instance, cs)
    evaluator = Evaluator(sentence, instance)

    def prune(member):
        return evaluator.evaluate(member) is True

    search = RepairSearch(hg.vertices, hg.edges, budget, prune)
    for repair in search:
        # leaves are fully decided, so the prune test already ran two-valued
        return repair
    return None


def exists_falsifying_repair(instance, cs, sentence, budget: int = DEFAULT_NODE_BUDGET,
                             hg=None) -> bool:
    return find_falsifying_repair(instance, cs, sentence, budget, hg) is not None


def oracle_status(instance, cs, sentence, budget: int = DEFAULT_NODE_BUDGET,
                  hg=None) -> AnswerStatus:
    """Fold the sentence's truth over every enumerated repair."""
    if sentence.free_vars:
        raise QueryError(f"expected a sentence, found free variables {list(sentence.free_vars)}")
    evaluator = Evaluator(sentence, instance)
    seen_true = seen_false = False
    for repair in enumerate_repairs(_hypergraph(instance, cs, hg), budget):
        if evaluator.evaluate(repair.__contains__):
            seen_true = True
        else:
            seen_false = True
        if seen_true and seen_false:
            return AnswerStatus.UNDETERMINED
    return AnswerStatus.CONSISTENTLY_FALSE if seen_false else AnswerStatus.CONSISTENTLY_TRUE


def oracle_answers(instance, cs, query, budget: int = DEFAULT_NODE_BUDGET, hg=None) -> set:
    """Bindings of the free variables that hold in every repair."""
    repairs = list(enumerate_repairs(_hypergraph(instance, cs, hg), budget))
    evaluator = Evaluator(query, instance)
    names = query.free_vars
    out = set()
    for values in candidate_bindings(instance, query):
        binding = dict(zip(names, values))
        if all(evaluator.evaluate(r.__contains__, binding) for r in repairs):
            out.add(values)
    return out

