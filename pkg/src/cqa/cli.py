"""``cqa`` command line: thin argument marshaling over the library.

Exit codes: 0 success, 1 a self-test disagreement, 2 usage or input
error, 3 a search or size budget ran out.
"""

from __future__ import annotations

import argparse
import json
import re
import sys
from pathlib import Path

from .conflict import DEFAULT_EDGE_BUDGET, LAZY, MATERIALIZED, build_hypergraph
from .constraints import ConstraintSet, is_consistent, parse_constraints, strip_comment
from .engine import STRATEGIES, cqa_answer, rewrite_single_fd
from .errors import BudgetExceeded, CQAError, ParseError
from .model import Attribute, Schema, format_cell, load_instance, serialize_instance, sort_rows
from .oracle import DEFAULT_NODE_BUDGET, count_repairs, enumerate_repairs, exists_falsifying_repair
from .queries import parse_query
from .reductions import GENERATORS, brute_3col, brute_sat, parse_dimacs, parse_edge_list
from .selftest import SUITES

EXIT_OK, EXIT_DISAGREE, EXIT_USAGE, EXIT_BUDGET = 0, 1, 2, 3


# -- input helpers -------------------------------------------------------------

def _read(path) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise ParseError(f"cannot read {path}: {e.strerror}") from None


def _with_source(fn, source, *args):
    try:
        return fn(*args)
    except ParseError as e:
        raise e.with_source(source) from None


def _instance(args):
    return _with_source(load_instance, args.instance, _read(args.instance), args.relation)


def _constraints(args, schema) -> ConstraintSet:
    if not args.constraints:
        return ConstraintSet(schema)
    return _with_source(parse_constraints, args.constraints, _read(args.constraints), schema)


def _query_text(args) -> str:
    if (args.query is None) == (args.query_file is None):
        raise ParseError("give exactly one of --query and --query-file")
    if args.query is not None:
        return args.query
    lines = _read(args.query_file).splitlines()
    return "\n".join(strip_comment(line) for line in lines)


def _query(args, schema):
    source = args.query_file or "--query"
    return _with_source(parse_query, source, _query_text(args), schema)


_SCHEMA = re.compile(r"\s*([A-Za-z_]\w*)\s*\((.*)\)\s*$")


def parse_schema(text: str) -> Schema:
    """``R(A:sym, B:num)``."""
    m = _SCHEMA.match(text)
    if not m:
        raise ParseError(f"schema {text!r} must look like R(A:sym, B:num)")
    attrs = []
    for cell in m.group(2).split(","):
        name, _, typ = cell.partition(":")
        attrs.append(Attribute(name.strip(), typ.strip()))
    return Schema(m.group(1), tuple(attrs))


def _positive(text: str) -> int:
    value = int(text)
    if value <= 0:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return value


# -- output helpers ------------------------------------------------------------

def _emit(obj) -> None:
    print(json.dumps(obj, ensure_ascii=False))


def format_table(header, rows) -> str:
    """Left-aligned columns separated by two spaces."""
    cells = [list(header)] + [[format_cell(v) for v in row] for row in rows]
    widths = [max(len(r[i]) for r in cells) for i in range(len(header))] if header else []
    return "\n".join("  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() for r in cells)


# -- subcommands ---------------------------------------------------------------

def cmd_check(args) -> int:
    instance = _instance(args)
    consistent = is_consistent(instance, _constraints(args, instance.schema))
    if args.format == "table":
        print(f"consistent: {'yes' if consistent else 'no'}")
    else:
        _emit({"consistent": consistent})
    return EXIT_OK


def cmd_repairs(args) -> int:
    instance = _instance(args)
    hg = build_hypergraph(instance, _constraints(args, instance.schema), MATERIALIZED,
                          args.edge_budget)
    if args.count:
        n = count_repairs(hg, args.budget)
        print(n if args.format == "table" else json.dumps({"repairs": n}))
        return EXIT_OK
    for k, repair in enumerate(enumerate_repairs(hg, args.budget)):
        rows = sort_rows(repair)
        if args.format == "table":
            if k:
                print()
            print(f"repair {k + 1}")
            print(format_table(instance.schema.names, rows))
        else:
            _emit([list(r) for r in rows])
    return EXIT_OK


def cmd_answer(args) -> int:
    instance = _instance(args)
    cs = _constraints(args, instance.schema)
    query = _query(args, instance.schema)
    result = cqa_answer(instance, cs, query, args.strategy, args.budget, args.edge_budget)
    if args.format == "json":
        _emit(result.to_json(args.timings))
        return EXIT_OK
    print(f"strategy: {result.strategy}")
    if result.status is not None:
        print(f"status: {result.status.value}")
    else:
        print(format_table(result.free_vars, result.answers))
    if args.timings:
        print(f"seconds: {result.stats['seconds']}")
    return EXIT_OK


def cmd_rewrite(args) -> int:
    if (args.schema is None) == (args.instance is None):
        raise ParseError("give exactly one of --schema and --instance")
    schema = parse_schema(args.schema) if args.schema else _instance(args).schema
    fd_cs = _with_source(parse_constraints, "--fd", f"fd: {args.fd}", schema)
    phi = _with_source(parse_query, "--phi", args.phi)
    print(rewrite_single_fd(fd_cs.fds[0], schema, phi))
    return EXIT_OK


_GEN_INPUT = {"monotone3sat": parse_dimacs, "threecol": parse_edge_list, "yfree": parse_dimacs}


def cmd_gen(args) -> int:
    source = _with_source(_GEN_INPUT[args.reduction], args.input, _read(args.input))
    instance, cs, query = GENERATORS[args.reduction](source)
    prefix = Path(args.out_prefix)
    prefix.parent.mkdir(parents=True, exist_ok=True)
    paths = {"instance": f"{prefix}.csv", "constraints": f"{prefix}.dsl", "query": f"{prefix}.query"}
    Path(paths["instance"]).write_text(serialize_instance(instance), encoding="utf-8")
    Path(paths["constraints"]).write_text(cs.to_dsl(), encoding="utf-8")
    Path(paths["query"]).write_text(f"{query}\n", encoding="utf-8")
    report = {"reduction": args.reduction, "facts": len(instance), **paths}
    if not args.large:
        expected = brute_3col(source) if args.reduction == "threecol" else brute_sat(source)
        found = exists_falsifying_repair(instance, cs, query, args.budget)
        report.update({"yes_instance": expected, "falsifying_repair": found,
                       "agrees": expected == found})
    _emit(report)
    return EXIT_OK if report.get("agrees", True) else EXIT_DISAGREE


def cmd_hypergraph(args) -> int:
    instance = _instance(args)
    hg = build_hypergraph(instance, _constraints(args, instance.schema),
                          LAZY if args.lazy else MATERIALIZED, args.edge_budget)
    stats = hg.stats(minimize=args.minimize_edges)
    if args.format == "table":
        for key in ("vertices", "edges", "isolated_vertices"):
            print(f"{key}: {stats[key]}")
        for size, n in stats["edge_size_histogram"].items():
            print(f"edges of size {size}: {n}")
    else:
        _emit(stats)
    return EXIT_OK


def cmd_selftest(args) -> int:
    ok = True
    for name in args.suite or SUITES:
        kwargs = {"seed": args.seed}
        if args.cases is not None:
            kwargs["cases"] = args.cases
        report = SUITES[name](**kwargs)
        ok = ok and report.passed
        _emit(report.to_json(args.timings))
    return EXIT_OK if ok else EXIT_DISAGREE


# -- parser --------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cqa", description="Consistent query answers over an inconsistent relation.")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    def data(p, constraints=True):
        p.add_argument("--instance", required=True, help="CSV file with a name:type header")
        p.add_argument("--relation", help="relation name (default: '# relation:' line, else R)")
        if constraints:
            p.add_argument("--constraints", help="constraint DSL file (default: none)")

    def fmt(p):
        p.add_argument("--format", choices=("json", "table"), default="json")

    def budgets(p):
        p.add_argument("--budget", type=_positive, default=DEFAULT_NODE_BUDGET,
                       help="repair-search node budget")
        p.add_argument("--edge-budget", type=_positive, default=DEFAULT_EDGE_BUDGET,
                       help="edge budget for a materialized hypergraph")

    p = sub.add_parser("check", help="is the instance consistent?")
    data(p)
    fmt(p)
    p.set_defaults(run=cmd_check)

    p = sub.add_parser("repairs", help="enumerate or count repairs")
    data(p)
    fmt(p)
    budgets(p)
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--enumerate", action="store_true", help="one repair per line (default)")
    mode.add_argument("--count", action="store_true")
    p.set_defaults(run=cmd_repairs)

    p = sub.add_parser("answer", help="consistent answers to a query")
    data(p)
    fmt(p)
    budgets(p)
    p.add_argument("--query", help="query text")
    p.add_argument("--query-file", help="file holding the query")
    p.add_argument("--strategy", choices=STRATEGIES, default="auto")
    p.add_argument("--timings", action="store_true", help="include wall-clock seconds")
    p.set_defaults(run=cmd_answer)

    p = sub.add_parser("rewrite", help="print the first-order rewriting for one FD")
    p.add_argument("--fd", required=True, help="e.g. 'Name -> City, Street'")
    p.add_argument("--phi", required=True, help="built-in condition over attribute names")
    p.add_argument("--schema", help="e.g. 'Person(Name:sym, City:sym, Street:sym)'")
    p.add_argument("--instance", help="take the schema from this CSV header instead")
    p.add_argument("--relation")
    p.set_defaults(run=cmd_rewrite)

    p = sub.add_parser("gen", help="emit a reduction instance")
    p.add_argument("reduction", choices=sorted(GENERATORS))
    p.add_argument("--input", required=True, help="DIMACS CNF, or an edge list for threecol")
    p.add_argument("--out-prefix", required=True, help="writes PREFIX.csv, .dsl and .query")
    p.add_argument("--large", action="store_true", help="skip the brute-force cross-check")
    p.add_argument("--budget", type=_positive, default=DEFAULT_NODE_BUDGET)
    p.set_defaults(run=cmd_gen)

    p = sub.add_parser("hypergraph", help="conflict hypergraph statistics")
    data(p)
    fmt(p)
    p.add_argument("--stats", action="store_true", help="accepted for symmetry; stats are the output")
    p.add_argument("--minimize-edges", action="store_true", help="drop non-minimal edges first")
    p.add_argument("--lazy", action="store_true", help="start from a lazy hypergraph")
    p.add_argument("--edge-budget", type=_positive, default=DEFAULT_EDGE_BUDGET)
    p.set_defaults(run=cmd_hypergraph)

    p = sub.add_parser("selftest", help="run the differential suites")
    p.add_argument("--suite", action="append", choices=sorted(SUITES))
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--cases", type=_positive)
    p.add_argument("--timings", action="store_true")
    p.set_defaults(run=cmd_selftest)
    return parser


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else EXIT_USAGE
    try:
        return args.run(args)
    except BudgetExceeded as e:
        print(f"cqa: budget exceeded: {e}", file=sys.stderr)
        return EXIT_BUDGET
    except CQAError as e:
        print(f"cqa: error: {e}", file=sys.stderr)
        return EXIT_USAGE


def main() -> None:
    sys.exit(run())
