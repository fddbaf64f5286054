"""Walk through the Person table: two addresses for Brown, one key.

    python3 demos/person_walkthrough.py
"""

from pathlib import Path

from cqa import (build_hypergraph, cqa_answer, enumerate_repairs, is_consistent, load_instance,
                 parse_constraints, parse_query)

DATA = Path(__file__).parent / "data"

inst = load_instance((DATA / "person.csv").read_text())
cs = parse_constraints((DATA / "person.dsl").read_text(), inst.schema)
print(f"{len(inst)} tuples, consistent: {is_consistent(inst, cs)}")

# Each repair keeps exactly one of Brown's two addresses.
for k, repair in enumerate(enumerate_repairs(build_hypergraph(inst, cs)), 1):
    print(f"repair {k}: {sorted(repair)}")

questions = [
    "Person(n, c, s)",                      # only Green's row survives everywhere
    "exists s. Person(n, c, s)",            # Brown lives in Amherst either way
    "Person('Brown','Amherst','115 Klein') | Person('Brown','Amherst','120 Maple')",
    "exists s. Person('Brown', c, s) & c = 'Amherst'",
    "exists c. Person('Brown', c, '115 Klein')",
]
for text in questions:
    result = cqa_answer(inst, cs, parse_query(text, inst.schema))
    outcome = result.status.value if result.status is not None else result.answers
    print(f"[{result.strategy:>7}] {text}\n          -> {outcome}")
