"""Hash-indexed backtracking join over one relation.

Used to find substitutions for denial constraint bodies and for guarded
quantifiers during evaluation.
"""

from __future__ import annotations

from operator import itemgetter

from .syntax import Const, compare, term_vars

_MISSING = object()


class TupleIndex:
    """Rows plus lazily built hash indices keyed on position subsets."""

    def __init__(self, rows):
        self.rows = rows
        self._indices = {}

    def __len__(self):
        return len(self.rows)

    def lookup(self, positions: tuple, key):
        """Rows whose values at ``positions`` equal ``key``.

        ``key`` is a bare value for a single position, a tuple otherwise
        (the ``itemgetter`` convention).
        """
        if not positions:
            return self.rows
        index = self._indices.get(positions)
        if index is None:
            getter = itemgetter(*positions)
            index = {}
            for row in self.rows:
                index.setdefault(getter(row), []).append(row)
            self._indices[positions] = index
        return index.get(key, ())


def match(pattern, row, binding: dict):
    """Extend ``binding`` so that ``pattern`` maps onto ``row``; None if impossible."""
    new = None
    for term, v in zip(pattern, row):
        if type(term) is Const:
            if term.value != v:
                return None
            continue
        current = binding.get(term.name, _MISSING) if new is None else new.get(term.name, _MISSING)
        if current is _MISSING:
            if new is None:
                new = dict(binding)
            new[term.name] = v
        elif current != v:
            return None
    return binding if new is None else new


def resolve(term, binding):
    return term.value if type(term) is Const else binding[term.name]


class Matcher:
    """All substitutions mapping a list of relation patterns onto rows.

    ``patterns`` are term tuples; ``builtins`` are ``(op, lhs, rhs)`` triples
    over the same variables, checked as soon as they become ground.
    """

    def __init__(self, patterns, builtins=()):
        self.patterns = tuple(tuple(p) for p in patterns)
        self.builtins = tuple(builtins)
        self._builtin_vars = [frozenset(term_vars((b[1], b[2]))) for b in self.builtins]

    def _builtins_ok(self, old: dict, new: dict) -> bool:
        for (op, lhs, rhs), vs in zip(self.builtins, self._builtin_vars):
            if all(v in new for v in vs) and not all(v in old for v in vs):
                if not compare(op, resolve(lhs, new), resolve(rhs, new)):
                    return False
        return True

    def _ground_builtins_ok(self, binding: dict) -> bool:
        for (op, lhs, rhs), vs in zip(self.builtins, self._builtin_vars):
            if all(v in binding for v in vs):
                if not compare(op, resolve(lhs, binding), resolve(rhs, binding)):
                    return False
        return True

    def solutions(self, index: TupleIndex, binding=None, pinned=None):
        """Yield ``(binding, rows)`` with ``rows[i]`` the row for pattern ``i``.

        ``pinned = (i, row)`` forces pattern ``i`` onto ``row`` first.
        """
        binding = dict(binding or {})
        if not self._ground_builtins_ok(binding):
            return
        chosen = [None] * len(self.patterns)
        remaining = list(range(len(self.patterns)))
        if pinned is not None:
            i, row = pinned
            b = match(self.patterns[i], row, binding)
            if b is None or not self._builtins_ok(binding, b):
                return
            chosen[i] = row
            remaining.remove(i)
            binding = b
        yield from self._search(index, remaining, binding, chosen)

    def _search(self, index, remaining, binding, chosen):
        if not remaining:
            yield binding, tuple(chosen)
            return
        # most constrained pattern next
        best = max(remaining, key=lambda i: sum(
            1 for t in self.patterns[i] if type(t) is Const or t.name in binding))
        pattern = self.patterns[best]
        positions = []
        key = []
        for p, t in enumerate(pattern):
            if type(t) is Const:
                positions.append(p)
                key.append(t.value)
            elif t.name in binding:
                positions.append(p)
                key.append(binding[t.name])
        key = key[0] if len(key) == 1 else tuple(key)
        rest = [i for i in remaining if i != best]
        for row in index.lookup(tuple(positions), key):
            b = match(pattern, row, binding)
            if b is None or not self._builtins_ok(binding, b):
                continue
            chosen[best] = row
            yield from self._search(index, rest, b, chosen)
        chosen[best] = None
