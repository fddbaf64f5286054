"""Hard cases: SAT and 3-colorability encoded as repair questions.

For each reduction, a falsifying repair exists exactly when the source
problem is a yes-instance. The brute-force solver and the repair search
are compared on the bundled inputs.

    python3 demos/reductions_tour.py
"""

from pathlib import Path

from cqa import (Graph, brute_3col, brute_sat, exists_falsifying_repair, gen_3col,
                 gen_3sat_yfree, gen_monotone3sat, parse_dimacs, parse_edge_list)

DATA = Path(__file__).parent / "data"

# "at least two of p1..p3" and "at most one of p1..p3" cannot both hold
UNSAT = "p cnf 3 6\n1 2 0\n1 3 0\n2 3 0\n-1 -2 0\n-1 -3 0\n-2 -3 0\n"

for label, formula in (("mono.cnf", parse_dimacs((DATA / "mono.cnf").read_text())),
                       ("two-and-at-most-one", parse_dimacs(UNSAT))):
    for name, gen in (("monotone 3SAT", gen_monotone3sat), ("Y-free 3SAT", gen_3sat_yfree)):
        inst, cs, query = gen(formula)
        print(f"{name} on {label}: {len(inst)} facts, query {query}")
        print(f"  satisfiable {brute_sat(formula)}, "
              f"falsifying repair {exists_falsifying_repair(inst, cs, query)}")

for label, graph in (("triangle", parse_edge_list((DATA / "triangle.edges").read_text())),
                     ("K3 plus a pendant", Graph((0, 1, 2, 3), ((0, 1), (0, 2), (1, 2), (2, 3))))):
    inst, cs, query = gen_3col(graph)
    print(f"3-colour {label}: {len(inst)} facts")
    print(f"  colourable {brute_3col(graph)}, falsifying repair {exists_falsifying_repair(inst, cs, query)}")
