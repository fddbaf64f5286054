"""Conflict hypergraphs: tuples as vertices, jointly violating tuple sets
as edges. Repairs are exactly the maximal independent sets."""

from __future__ import annotations

from collections import Counter

from .constraints import ConstraintSet
from .errors import BudgetExceeded, TypeCheckError
from .join import TupleIndex
from .model import Instance, row_key

MATERIALIZED = "materialized"
LAZY = "lazy"
DEFAULT_EDGE_BUDGET = 10**7


def edge_key(edge):
    return (len(edge), sorted(row_key(r) for r in edge))


class ConflictHypergraph:
    """Conflict hypergraph of an instance under a constraint set.

    In materialized mode every edge is enumerated up front and indexed by
    vertex. In lazy mode nothing is enumerated; ``edges_containing`` probes
    each constraint with the tuple pinned to each literal, and
    ``is_independent`` joins the constraints over the candidate set only.
    Both modes answer every query identically.
    """

    def __init__(self, instance: Instance, constraints: ConstraintSet,
                 mode: str = MATERIALIZED, edge_budget: int = DEFAULT_EDGE_BUDGET):
        if mode not in (MATERIALIZED, LAZY):
            raise ValueError(f"unknown hypergraph mode {mode!r}")
        if constraints.schema != instance.schema:
            raise TypeCheckError("constraints and instance use different schemas")
        self.instance = instance
        self.constraints = constraints
        self.mode = mode
        self.edge_budget = edge_budget
        self._index = TupleIndex(instance.tuples)
        self._edges = None
        self._incidence = None
        if mode == MATERIALIZED:
            self._materialize()

    def _materialize(self):
        edges = set()
        for c in self.constraints.all_denials:
            for _, chosen in c.matcher.solutions(self._index):
                edges.add(frozenset(chosen))
                if len(edges) > self.edge_budget:
                    raise BudgetExceeded(
                        f"conflict hypergraph has more than {self.edge_budget} edges; "
                        "use lazy mode instead")
        incidence = {}
        for e in edges:
            for t in e:
                incidence.setdefault(t, []).append(e)
        for t in incidence:
            incidence[t].sort(key=edge_key)
        self._edges = edges
        self._incidence = incidence

    @property
    def vertices(self) -> tuple:
        """Vertices in canonical order."""
        return self.instance.rows

    @property
    def edges(self) -> list:
        """All edges in canonical order (enumerates them in lazy mode)."""
        if self._edges is None:
            self._materialize()
        return sorted(self._edges, key=edge_key)

    def _check_vertex(self, t):
        if t not in self.instance.tuples:
            raise KeyError(f"{t!r} is not a vertex of the conflict hypergraph")

    def edges_containing(self, t) -> list:
        self._check_vertex(t)
        if self._incidence is not None:
            return list(self._incidence.get(t, ()))
        found = set()
        for c in self.constraints.all_denials:
            matcher = c.matcher
            for i in range(len(matcher.patterns)):
                for _, chosen in matcher.solutions(self._index, pinned=(i, t)):
                    found.add(frozenset(chosen))
        return sorted(found, key=edge_key)

    def is_independent(self, s) -> bool:
        s = frozenset(s)
        for t in s:
            self._check_vertex(t)
        if self._incidence is not None:
            return not any(e <= s for t in s for e in self._incidence.get(t, ()))
        index = TupleIndex(list(s))
        for c in self.constraints.all_denials:
            for _ in c.matcher.solutions(index):
                return False
        return True

    def can_add(self, t, s) -> bool:
        """Whether ``s | {t}`` is independent, given that ``s`` is."""
        return not any(e - {t} <= s for e in self.edges_containing(t))

    def extend_to_maximal(self, s) -> frozenset:
        """Grow the independent set ``s`` into a repair, scanning the
        remaining tuples in canonical order."""
        current = set(s)
        if not self.is_independent(current):
            raise ValueError("the starting set is not independent")
        for t in self.vertices:
            if t not in current and self.can_add(t, current):
                current.add(t)
        return frozenset(current)

    def is_repair(self, s) -> bool:
        s = frozenset(s)
        if not self.is_independent(s):
            return False
        return not any(self.can_add(t, s) for t in self.vertices if t not in s)

    def components(self) -> list:
        """Vertex sets of the connected components, in canonical order."""
        parent = {t: t for t in self.vertices}

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for e in self.edges:
            it = iter(e)
            root = find(next(it))
            for t in it:
                other = find(t)
                if other != root:
                    parent[other] = root
        groups = {}
        for t in self.vertices:
            groups.setdefault(find(t), []).append(t)
        return list(groups.values())

    def stats(self, minimize: bool = False) -> dict:
        edges = self.edges
        if minimize:
            edges = minimal_edges(edges)
        touched = {t for e in edges for t in e}
        histogram = Counter(len(e) for e in edges)
        return {
            "vertices": len(self.vertices),
            "edges": len(edges),
            "edge_size_histogram": {str(k): histogram[k] for k in sorted(histogram)},
            "isolated_vertices": len(self.vertices) - len(touched),
        }


def minimal_edges(edges) -> list:
    """Drop edges that strictly contain another edge."""
    edges = sorted(set(edges), key=edge_key)
    by_vertex = {}
    kept = []
    for e in edges:  # shorter edges come first
        if any(f < e for t in e for f in by_vertex.get(t, ())):
            continue
        kept.append(e)
        for t in e:
            by_vertex.setdefault(t, []).append(e)
    return kept


def build_hypergraph(instance: Instance, constraints: ConstraintSet,
                     mode: str = MATERIALIZED,
                     edge_budget: int = DEFAULT_EDGE_BUDGET) -> ConflictHypergraph:
    return ConflictHypergraph(instance, constraints, mode, edge_budget)
