"""Hardness constructions as instance generators.

Each ``gen_*`` maps a SAT or coloring input to an (instance, constraints,
query) triple such that the input is a yes-instance exactly when some
repair falsifies the query. ``brute_sat`` and ``brute_3col`` are the
independent exhaustive checkers used to test that biconditional.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .constraints import parse_constraints
from .errors import BudgetExceeded, InputError, ParseError
from .model import Instance, Schema
from .queries import parse_query

MAX_BRUTE_VARIABLES = 24
MAX_BRUTE_NODES = 10

# reserved colour tags
C, C_PRIME = "c", "c_prime"
PURPLE, GREEN, BLUE = "p", "g", "b"

TRIPLE_SYM = Schema.of("R", A="sym", B="sym", C="sym")
MONOTONE_SCHEMA = Schema.of("R", A="num", B="sym", C="sym")


# -- inputs ------------------------------------------------------------------

@dataclass(frozen=True)
class CnfFormula:
    """CNF over named variables; literals are signed 1-based indices."""

    variables: tuple
    clauses: tuple

    def __post_init__(self):
        object.__setattr__(self, "variables", tuple(self.variables))
        object.__setattr__(self, "clauses", tuple(tuple(c) for c in self.clauses))
        if len(set(self.variables)) != len(self.variables):
            raise InputError("duplicate variable name")
        n = len(self.variables)
        for clause in self.clauses:
            for lit in clause:
                if not isinstance(lit, int) or lit == 0 or abs(lit) > n:
                    raise InputError(f"literal {lit!r} out of range for {n} variables")

    @classmethod
    def from_names(cls, clauses) -> "CnfFormula":
        """Build from clauses of names, negation written ``-p`` or ``~p``."""
        names = []
        for clause in clauses:
            for lit in clause:
                name = lit.lstrip("-~")
                if name not in names:
                    names.append(name)
        index = {name: i for i, name in enumerate(names, 1)}
        return cls(tuple(names), tuple(
            tuple(-index[lit.lstrip("-~")] if lit[0] in "-~" else index[lit] for lit in clause)
            for clause in clauses))

    @property
    def is_monotone(self) -> bool:
        return all(all(l > 0 for l in c) or all(l < 0 for l in c) for c in self.clauses)

    def satisfied_by(self, assignment) -> bool:
        """``assignment[i]`` is the value of variable ``i + 1``."""
        return all(any(assignment[abs(l) - 1] == (l > 0) for l in c) for c in self.clauses)

    def to_dimacs(self) -> str:
        lines = [f"p cnf {len(self.variables)} {len(self.clauses)}"]
        lines += [" ".join(map(str, c)) + " 0" for c in self.clauses]
        return "\n".join(lines) + "\n"


def parse_dimacs(text: str) -> CnfFormula:
    """DIMACS CNF: ``c`` comments, one ``p cnf V C`` header, clauses ended by 0.

    Variable ``i`` is named ``p<i>``. Clauses may span lines; a ``%`` line
    ends the input.
    """
    header = None
    clauses, current = [], []
    for lineno, line in enumerate(text.splitlines(), 1):
        stripped = line.strip()
        if not stripped or stripped.startswith("c"):
            continue
        if stripped.startswith("%"):
            break
        if stripped.startswith("p"):
            parts = stripped.split()
            if header is not None or len(parts) != 4 or parts[1] != "cnf":
                raise ParseError("expected a single 'p cnf <vars> <clauses>' header", lineno, 1)
            try:
                header = (int(parts[2]), int(parts[3]))
            except ValueError:
                raise ParseError("header counts must be integers", lineno, 1) from None
            continue
        if header is None:
            raise ParseError("clause before the 'p cnf' header", lineno, 1)
        column = 1
        for token in stripped.split():
            column = line.index(token, column - 1) + 1
            try:
                lit = int(token)
            except ValueError:
                raise ParseError(f"bad literal {token!r}", lineno, column) from None
            if abs(lit) > header[0]:
                raise ParseError(f"literal {lit} exceeds the declared {header[0]} variables",
                                 lineno, column)
            if lit == 0:
                clauses.append(tuple(current))
                current = []
            else:
                current.append(lit)
            column += len(token)
    if header is None:
        raise ParseError("missing 'p cnf' header")
    if current:
        clauses.append(tuple(current))
    if len(clauses) != header[1]:
        raise ParseError(f"header declares {header[1]} clauses, found {len(clauses)}")
    return CnfFormula(tuple(f"p{i}" for i in range(1, header[0] + 1)), tuple(clauses))


@dataclass(frozen=True)
class Graph:
    """Simple undirected graph; edges are stored as sorted pairs."""

    nodes: tuple
    edges: tuple = ()

    def __post_init__(self):
        nodes = tuple(dict.fromkeys(self.nodes))
        pairs = set()
        for u, v in self.edges:
            if u == v:
                raise InputError(f"self-loop on {u!r}")
            for x in (u, v):
                if x not in nodes:
                    raise InputError(f"edge endpoint {x!r} is not a node")
            pairs.add(tuple(sorted((u, v))))
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "edges", tuple(sorted(pairs)))

    @classmethod
    def complete(cls, n: int) -> "Graph":
        nodes = tuple(str(i) for i in range(1, n + 1))
        return cls(nodes, tuple(itertools.combinations(nodes, 2)))


def parse_edge_list(text: str) -> Graph:
    """One ``u v`` pair per line; a lone name declares an isolated node."""
    nodes, edges = [], []
    for lineno, line in enumerate(text.splitlines(), 1):
        parts = line.split("#", 1)[0].split()
        if not parts:
            continue
        if len(parts) > 2:
            raise ParseError("expected 'u v' or a single node name", lineno, 1)
        if len(parts) == 2 and parts[0] == parts[1]:
            raise ParseError(f"self-loop on {parts[0]!r}", lineno, 1)
        nodes.extend(p for p in parts if p not in nodes)
        if len(parts) == 2:
            edges.append(tuple(parts))
    return Graph(tuple(nodes), tuple(edges))


# -- intermediate coloured graphs ---------------------------------------------

@dataclass(frozen=True)
class BipartiteColoredGraph:
    vertices: tuple
    green: frozenset
    blue: frozenset

    def __post_init__(self):
        if self.green & self.blue:
            raise InputError("green and blue edges overlap")
        side = {}
        adjacency = {v: [] for v in self.vertices}
        for u, v in self.green | self.blue:
            adjacency[u].append(v)
            adjacency[v].append(u)
        for start in self.vertices:
            if start in side:
                continue
            side[start] = 0
            stack = [start]
            while stack:
                u = stack.pop()
                for v in adjacency[u]:
                    if v not in side:
                        side[v] = 1 - side[u]
                        stack.append(v)
                    elif side[v] == side[u]:
                        raise InputError("graph is not bipartite")


@dataclass(frozen=True)
class DirectedColoredGraph:
    vertices: tuple
    purple: frozenset
    green: frozenset
    blue: frozenset

    def __post_init__(self):
        if self.purple & self.green or self.purple & self.blue or self.green & self.blue:
            raise InputError("edge colours must be disjoint")


def _v(node, eps, prime=False):
    return f"v{node}_{eps}" + ("_prime" if prime else "")


def coloring_graph(h: Graph) -> BipartiteColoredGraph:
    """Bipartite edge-coloured graph with a maximal V-free green subset
    exactly when ``h`` is 3-colorable: ten vertices per node, eight green
    gadget edges and six blue edges per node, three blue edges per
    direction of every edge of ``h``."""
    vertices = tuple(_v(u, e, p) for u in h.nodes for p in (False, True) for e in "mnrgb")
    green, blue = set(), set()
    for u in h.nodes:
        for a, b in (("m", "r"), ("m", "b"), ("n", "b"), ("n", "g")):
            green.add((_v(u, a), _v(u, b, True)))
        for a, b in (("r", "m"), ("b", "m"), ("b", "n"), ("g", "n")):
            green.add((_v(u, a), _v(u, b, True)))
        for a, b in itertools.permutations("rgb", 2):
            blue.add((_v(u, a), _v(u, b, True)))
    for u, w in h.edges:
        for x, y in ((u, w), (w, u)):
            for eps in "rgb":
                blue.add((_v(y, eps), _v(x, eps, True)))
    return BipartiteColoredGraph(vertices, frozenset(green), frozenset(blue))


def sat_graph(f: CnfFormula) -> DirectedColoredGraph:
    """Directed edge-coloured graph with a maximal Y-free subset avoiding
    purple edges exactly when ``f`` is satisfiable."""
    n, l = len(f.variables), len(f.clauses)
    vertices = tuple(f"{p}{i}" for i in range(1, n + 1) for p in "abcd")
    vertices += tuple(f"{p}{j}" for j in range(1, l + 1) for p in "efg")
    purple = {(f"a{i}", f"b{i}") for i in range(1, n + 1)}
    purple |= {(f"e{j}", f"f{j}") for j in range(1, l + 1)}
    green = {(f"b{i}", f"d{i}") for i in range(1, n + 1)}
    green |= {(f"e{j}", f"g{j}") for j in range(1, l + 1)}
    blue = {(f"b{i}", f"c{i}") for i in range(1, n + 1)}
    for j, clause in enumerate(f.clauses, 1):
        for lit in clause:
            (green if lit > 0 else blue).add((f"d{abs(lit)}", f"e{j}"))
    return DirectedColoredGraph(vertices, frozenset(purple), frozenset(green), frozenset(blue))


# -- generators --------------------------------------------------------------

def gen_monotone3sat(f: CnfFormula):
    """FD ``A -> B,C`` and ``exists x,y,z. R(x,y,'c') & R(z,y,'c_prime')``.

    Positive clauses are numbered first. A positive clause ``i`` holding
    ``p`` gives ``R(i,p,'c_prime')``; a negative one gives ``R(i,p,'c')``.
    """
    if not f.is_monotone:
        raise InputError("every clause must be all-positive or all-negative")
    if any(not c for c in f.clauses):
        raise InputError("empty clause")
    ordered = [c for c in f.clauses if c[0] > 0] + [c for c in f.clauses if c[0] < 0]
    rows = []
    for i, clause in enumerate(ordered, 1):
        tag = C_PRIME if clause[0] > 0 else C
        rows.extend((i, f.variables[abs(l) - 1], tag) for l in clause)
    schema = MONOTONE_SCHEMA
    cs = parse_constraints("fd: A -> B, C", schema)
    query = parse_query(f"exists x,y,z. R(x,y,'{C}') & R(z,y,'{C_PRIME}')", schema)
    return Instance(schema, rows), cs, query


def gen_3col(h: Graph):
    """FDs ``A -> B,C`` and ``B -> A,C`` and ``exists x,y. R(x,y,'b')``."""
    g = coloring_graph(h)
    rows = [(x, y, GREEN) for x, y in g.green] + [(x, y, BLUE) for x, y in g.blue]
    schema = TRIPLE_SYM
    cs = parse_constraints("fd: A -> B, C\nfd: B -> A, C", schema)
    query = parse_query(f"exists x,y. R(x,y,'{BLUE}')", schema)
    return Instance(schema, rows), cs, query


YFREE_DENIAL = "denial: R(x,y,s), R(y,z,s1), R(y,w,s2), s1 != s2"


def gen_3sat_yfree(f: CnfFormula):
    """One denial (an edge into ``y`` plus two differently coloured edges
    out of ``y``) and ``exists x,y. R(x,y,'p')``."""
    for j, clause in enumerate(f.clauses, 1):
        if not clause:
            raise InputError(f"clause {j} is empty")
        if len(clause) > 3:
            raise InputError(f"clause {j} has {len(clause)} literals; at most 3 allowed")
    g = sat_graph(f)
    rows = [(x, y, PURPLE) for x, y in g.purple]
    rows += [(x, y, GREEN) for x, y in g.green] + [(x, y, BLUE) for x, y in g.blue]
    schema = TRIPLE_SYM
    cs = parse_constraints(YFREE_DENIAL, schema)
    query = parse_query(f"exists x,y. R(x,y,'{PURPLE}')", schema)
    return Instance(schema, rows), cs, query


GENERATORS = {
    "monotone3sat": gen_monotone3sat,
    "threecol": gen_3col,
    "yfree": gen_3sat_yfree,
}


# -- brute-force verifiers -----------------------------------------------------

def brute_sat(f: CnfFormula) -> bool:
    n = len(f.variables)
    if n > MAX_BRUTE_VARIABLES:
        raise BudgetExceeded(f"{n} variables exceeds the brute-force limit of {MAX_BRUTE_VARIABLES}")
    return any(f.satisfied_by(a) for a in itertools.product((False, True), repeat=n))


def brute_3col(h: Graph) -> bool:
    n = len(h.nodes)
    if n > MAX_BRUTE_NODES:
        raise BudgetExceeded(f"{n} nodes exceeds the brute-force limit of {MAX_BRUTE_NODES}")
    pos = {u: i for i, u in enumerate(h.nodes)}
    pairs = [(pos[u], pos[v]) for u, v in h.edges]
    return any(all(c[i] != c[j] for i, j in pairs)
               for c in itertools.product(range(3), repeat=n))


__all__ = [
    "CnfFormula", "parse_dimacs", "Graph", "parse_edge_list",
    "BipartiteColoredGraph", "DirectedColoredGraph", "coloring_graph", "sat_graph",
    "gen_monotone3sat", "gen_3col", "gen_3sat_yfree", "GENERATORS", "YFREE_DENIAL",
    "brute_sat", "brute_3col", "MAX_BRUTE_VARIABLES", "MAX_BRUTE_NODES",
]
