import pytest

from cqa import load_instance, parse_constraints

PERSON_CSV = """\
# relation: Person
Name:sym,City:sym,Street:sym
Brown,Amherst,115 Klein
Brown,Amherst,120 Maple
Green,Clarence,4000 Transit
"""

T1 = ("Brown", "Amherst", "115 Klein")
T2 = ("Brown", "Amherst", "120 Maple")
T3 = ("Green", "Clarence", "4000 Transit")


@pytest.fixture
def person():
    inst = load_instance(PERSON_CSV)
    return inst, parse_constraints("fd: Name -> City, Street", inst.schema)
