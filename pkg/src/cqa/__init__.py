"""Consistent query answering over one inconsistent relation.

Repairs are the maximal subsets of an instance satisfying a set of denial
constraints (functional dependencies included). A query's consistent
answers are those true in every repair. Quantifier-free queries and
single-atom existential queries under one FD are answered in polynomial
time; everything else goes to an exact, budgeted repair search.
"""

from .conflict import LAZY, MATERIALIZED, ConflictHypergraph, build_hypergraph, minimal_edges
from .constraints import (FD, ConstraintSet, DenialConstraint, fd_to_denial, is_consistent,
                          parse_constraints, violations)
from .engine import (CQAResult, clause_refutable, cqa_answer, qfree_consistent_answers,
                     qfree_consistent_true, qfree_status, refuting_repair, rewrite_single_fd)
from .errors import (BudgetExceeded, CQAError, InputError, ParseError, QueryError,
                     StrategyError, TypeCheckError)
from .model import (NUM, SYM, Attribute, Instance, Schema, active_domain, load_instance,
                    parse_instance, serialize_instance)
from .oracle import (AnswerStatus, count_repairs, enumerate_repairs, exists_falsifying_repair,
                     find_falsifying_repair, oracle_answers, oracle_status)
from .queries import (Fragment, GroundClause, eval_fo, fragment, ground, parse_query, to_cnf)
from .reductions import (CnfFormula, Graph, brute_3col, brute_sat, gen_3col, gen_3sat_yfree,
                         gen_monotone3sat, parse_dimacs, parse_edge_list)

__version__ = "0.1.0"

__all__ = [
    "LAZY", "MATERIALIZED", "ConflictHypergraph", "build_hypergraph", "minimal_edges",
    "FD", "ConstraintSet", "DenialConstraint", "fd_to_denial", "is_consistent",
    "parse_constraints", "violations",
    "CQAResult", "clause_refutable", "cqa_answer", "qfree_consistent_answers",
    "qfree_consistent_true", "qfree_status", "refuting_repair", "rewrite_single_fd",
    "BudgetExceeded", "CQAError", "InputError", "ParseError", "QueryError", "StrategyError",
    "TypeCheckError",
    "NUM", "SYM", "Attribute", "Instance", "Schema", "active_domain", "load_instance",
    "parse_instance", "serialize_instance",
    "AnswerStatus", "count_repairs", "enumerate_repairs", "exists_falsifying_repair",
    "find_falsifying_repair", "oracle_answers", "oracle_status",
    "Fragment", "GroundClause", "eval_fo", "fragment", "ground", "parse_query", "to_cnf",
    "CnfFormula", "Graph", "brute_3col", "brute_sat", "gen_3col", "gen_3sat_yfree",
    "gen_monotone3sat", "parse_dimacs", "parse_edge_list",
]
