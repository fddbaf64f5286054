"""Exception hierarchy shared by every module."""


class CQAError(Exception):
    """Base class for all errors raised by this package."""


class ParseError(CQAError):
    """Malformed CSV, constraint or query text.

    ``line`` and ``column`` are 1-based; either may be ``None`` when the
    position is unknown.
    """

    def __init__(self, message, line=None, column=None, source=None):
        self.message = message
        self.line = line
        self.column = column
        self.source = source
        super().__init__(self._render())

    def _render(self):
        where = []
        if self.source:
            where.append(str(self.source))
        if self.line is not None:
            where.append(f"line {self.line}")
        if self.column is not None:
            where.append(f"column {self.column}")
        if where:
            return f"{', '.join(where)}: {self.message}"
        return self.message

    def with_source(self, source):
        return ParseError(self.message, self.line, self.column, source)


class TypeCheckError(CQAError):
    """Arity, attribute or Sym/Num typing violation."""


class BudgetExceeded(CQAError):
    """An exponential search ran past its configured budget.

    Raised instead of returning a possibly wrong answer.
    """


class StrategyError(CQAError):
    """The requested answering strategy does not apply to the query."""


class QueryError(CQAError):
    """A query used outside the fragment an operation accepts."""


class InputError(CQAError, ValueError):
    """A reduction input outside the class its construction accepts."""
