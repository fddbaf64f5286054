"""Typed values, schemas, relation instances and their CSV form.

Values are plain Python objects: ``str`` for uninterpreted symbols and
``int`` for numbers. The two never compare equal, which is exactly the
disjointness the two domains need, and ``int`` gives arbitrary precision
with a total ``<``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Iterator, Union

from .errors import ParseError, TypeCheckError

Value = Union[str, int]
Row = tuple  # tuple of Value, length = schema arity

SYM = "sym"
NUM = "num"
TYPES = (SYM, NUM)

_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")
_NUMBER = re.compile(r"-?[0-9]+\Z")
_CELL = re.compile(r'\s*(?:"((?:[^"]|"")*)"|([^,"]*?))\s*(?:,|\Z)')
_DIRECTIVE = re.compile(r"#\s*relation\s*:\s*([A-Za-z_][A-Za-z0-9_]*)\s*\Z")


def value_type(v: Value) -> str:
    if isinstance(v, bool):
        raise TypeCheckError(f"booleans are not database values: {v!r}")
    if isinstance(v, int):
        return NUM
    if isinstance(v, str):
        return SYM
    raise TypeCheckError(f"not a database value: {v!r}")


def value_key(v: Value):
    # numbers sort before symbols; within a domain the natural order
    return (0, v) if isinstance(v, int) else (1, v)


def row_key(row: Row):
    return tuple((0, v) if isinstance(v, int) else (1, v) for v in row)


def sort_rows(rows: Iterable[Row]) -> list:
    """Rows in canonical order (the order every deterministic scan uses)."""
    return sorted(rows, key=row_key)


@dataclass(frozen=True)
class Attribute:
    name: str
    type: str

    def __post_init__(self):
        if not _IDENT.match(self.name):
            raise TypeCheckError(f"invalid attribute name {self.name!r}")
        if self.type not in TYPES:
            raise TypeCheckError(f"attribute {self.name}: unknown type {self.type!r}")


@dataclass(frozen=True)
class Schema:
    relation: str
    attributes: tuple

    def __post_init__(self):
        attrs = tuple(a if isinstance(a, Attribute) else Attribute(*a) for a in self.attributes)
        object.__setattr__(self, "attributes", attrs)
        if not _IDENT.match(self.relation):
            raise TypeCheckError(f"invalid relation name {self.relation!r}")
        if not attrs:
            raise TypeCheckError("a schema needs at least one attribute")
        names = [a.name for a in attrs]
        if len(set(names)) != len(names):
            raise TypeCheckError(f"duplicate attribute names in {names}")

    @classmethod
    def of(cls, relation: str, **types: str) -> "Schema":
        """``Schema.of("R", A="sym", B="num")``."""
        return cls(relation, tuple(Attribute(n, t) for n, t in types.items()))

    @property
    def arity(self) -> int:
        return len(self.attributes)

    @property
    def names(self) -> tuple:
        return tuple(a.name for a in self.attributes)

    @property
    def types(self) -> tuple:
        return tuple(a.type for a in self.attributes)

    def position(self, name: str) -> int:
        for i, a in enumerate(self.attributes):
            if a.name == name:
                return i
        raise TypeCheckError(f"unknown attribute {name!r} of {self.relation}")

    def check_row(self, row: Row) -> None:
        if len(row) != self.arity:
            raise TypeCheckError(
                f"{self.relation} has arity {self.arity}, got {len(row)} values in {row!r}")
        for v, a in zip(row, self.attributes):
            if value_type(v) != a.type:
                raise TypeCheckError(f"attribute {a.name} is {a.type}, got {v!r}")

    def header(self) -> str:
        return ",".join(f"{a.name}:{a.type}" for a in self.attributes)

    def __str__(self):
        return f"{self.relation}({', '.join(f'{a.name}:{a.type}' for a in self.attributes)})"


class Instance:
    """A finite, duplicate-free relation instance. Immutable."""

    __slots__ = ("schema", "tuples", "__dict__")

    def __init__(self, schema: Schema, rows: Iterable[Row] = (), *, check: bool = True):
        rows = frozenset(tuple(r) for r in rows)
        if check:
            for r in rows:
                schema.check_row(r)
        self.schema = schema
        self.tuples = rows

    def __len__(self):
        return len(self.tuples)

    def __iter__(self) -> Iterator[Row]:
        return iter(self.rows)

    def __contains__(self, row):
        return row in self.tuples

    def __eq__(self, other):
        if not isinstance(other, Instance):
            return NotImplemented
        return self.schema == other.schema and self.tuples == other.tuples

    def __hash__(self):
        return hash((self.schema, self.tuples))

    def __repr__(self):
        return f"Instance({self.schema}, {len(self)} tuples)"

    @cached_property
    def rows(self) -> tuple:
        """Tuples in canonical order."""
        return tuple(sort_rows(self.tuples))

    def subset(self, rows: Iterable[Row]) -> "Instance":
        rows = frozenset(rows)
        if not rows <= self.tuples:
            raise TypeCheckError("subset contains tuples not in the instance")
        return Instance(self.schema, rows, check=False)


def active_domain(instance: Instance) -> set:
    """Every value occurring in some tuple of ``instance``."""
    return {v for row in instance.tuples for v in row}


def typed_domain(instance: Instance) -> dict:
    """Active domain split by type, each part in canonical order."""
    dom = {SYM: set(), NUM: set()}
    for row in instance.tuples:
        for v in row:
            dom[NUM if isinstance(v, int) else SYM].add(v)
    return {t: sorted(vs) for t, vs in dom.items()}


# -- CSV ---------------------------------------------------------------------

def _split_cells(line: str, lineno: int):
    """Split one CSV line into (text, quoted) cells."""
    cells = []
    pos = 0
    while True:
        m = _CELL.match(line, pos)
        if m is None:
            raise ParseError("malformed quoting", lineno, pos + 1)
        if m.group(1) is not None:
            cells.append((m.group(1).replace('""', '"'), True, pos + 1))
        else:
            cells.append((m.group(2), False, pos + 1))
        pos = m.end()
        if not m.group(0).endswith(","):
            return cells


def parse_cell(text: str, quoted: bool) -> Value:
    """Bare digits (with optional ``-``) are numbers, everything else a symbol."""
    if not quoted and _NUMBER.match(text):
        return int(text)
    return text


def format_cell(v: Value) -> str:
    if isinstance(v, int):
        return str(v)
    if (_NUMBER.match(v) or v != v.strip() or not v or any(c in v for c in ',"')
            or v.startswith("#")):
        return '"' + v.replace('"', '""') + '"'
    return v


def _content_lines(text: str):
    for lineno, line in enumerate(text.splitlines(), 1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        yield lineno, line.rstrip("\r\n")


def parse_header(line: str, relation: str = "R", lineno: int = 1) -> Schema:
    attrs = []
    for text, quoted, col in _split_cells(line, lineno):
        name, sep, typ = text.partition(":")
        if quoted or not sep:
            raise ParseError(f"header cell {text!r} must look like name:sym or name:num",
                             lineno, col)
        try:
            attrs.append(Attribute(name.strip(), typ.strip()))
        except TypeCheckError as e:
            raise ParseError(str(e), lineno, col) from None
    try:
        return Schema(relation, tuple(attrs))
    except TypeCheckError as e:
        raise ParseError(str(e), lineno, 1) from None


def relation_directive(csv_text: str):
    """The name given by a ``# relation: Name`` comment line, if any."""
    for line in csv_text.splitlines():
        m = _DIRECTIVE.match(line.strip())
        if m:
            return m.group(1)
    return None


def parse_instance(csv_text: str, schema: Schema) -> Instance:
    """Read CSV text whose header must match ``schema``.

    Duplicate rows collapse; errors carry the 1-based row and column.
    """
    lines = _content_lines(csv_text)
    try:
        lineno, header = next(lines)
    except StopIteration:
        raise ParseError("missing header row") from None
    found = parse_header(header, schema.relation, lineno)
    if found.names != schema.names:
        unknown = [n for n in found.names if n not in schema.names]
        if unknown:
            raise ParseError(f"unknown header attribute(s) {unknown}", lineno, 1)
        raise ParseError(f"header {list(found.names)} does not match schema {list(schema.names)}",
                         lineno, 1)
    if found.types != schema.types:
        raise ParseError(f"header types {list(found.types)} do not match schema "
                         f"{list(schema.types)}", lineno, 1)
    rows = set()
    for lineno, line in lines:
        cells = _split_cells(line, lineno)
        if len(cells) != schema.arity:
            raise ParseError(f"expected {schema.arity} cells, found {len(cells)}", lineno, 1)
        row = []
        for (text, quoted, col), attr in zip(cells, schema.attributes):
            v = parse_cell(text, quoted)
            if value_type(v) != attr.type:
                raise ParseError(f"cell {text!r} is not a {attr.type} value for {attr.name}",
                                 lineno, col)
            row.append(v)
        rows.add(tuple(row))
    return Instance(schema, rows, check=False)


def load_instance(csv_text: str, relation: str | None = None) -> Instance:
    """Parse CSV taking the schema from its typed header.

    The relation name comes from ``relation``, else a ``# relation: Name``
    comment, else defaults to ``R``.
    """
    relation = relation or relation_directive(csv_text) or "R"
    lines = _content_lines(csv_text)
    try:
        lineno, header = next(lines)
    except StopIteration:
        raise ParseError("missing header row") from None
    schema = parse_header(header, relation, lineno)
    return parse_instance(csv_text, schema)


def serialize_instance(instance: Instance, directive: bool = True) -> str:
    out = []
    if directive:
        out.append(f"# relation: {instance.schema.relation}")
    out.append(instance.schema.header())
    for row in instance.rows:
        out.append(",".join(format_cell(v) for v in row))
    return "\n".join(out) + "\n"
