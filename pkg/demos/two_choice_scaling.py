"""Exponentially many repairs, answered without enumerating them.

The instance r_n has keys a1..an, each with two B values, so 2^n repairs.
The quantifier-free engine's cost tracks the size of the query and the
instance, not the repair count.

    python3 demos/two_choice_scaling.py
"""

import time

from cqa import build_hypergraph, count_repairs, cqa_answer, parse_query
from cqa.selftest import two_choice_family

for n in (4, 10, 20):
    inst, cs = two_choice_family(n)
    print(f"r_{n}: {count_repairs(build_hypergraph(inst, cs))} repairs")

for n in (1_000, 10_000, 100_000):
    inst, cs = two_choice_family(n)
    query = parse_query(f"R('a{n}','b0') | R('a{n}','b1')", inst.schema)
    started = time.perf_counter()
    result = cqa_answer(inst, cs, query)
    took = time.perf_counter() - started
    print(f"r_{n}: 2^{n} repairs, {result.status.value} via {result.strategy} in {took:.3f}s")
