"""Exception hierarchy shared by every module."""

from __future__ import annotations


class GNCGError(Exception):
    """Base class for all library errors."""


class InvalidHostError(GNCGError, ValueError):
    """A weight matrix, point set or tree does not describe a valid host graph.

    ``pair`` holds the offending index pair (or ``None`` when the problem is
    not tied to a single entry).
    """

    def __init__(self, message: str, pair: tuple[int, int] | None = None):
        super().__init__(message)
        self.pair = pair


class InvalidProfileError(GNCGError, ValueError):
    """A strategy profile is inconsistent with its host graph."""


class CapExceededError(GNCGError):
    """An exhaustive routine was asked to run beyond its size cap."""

    def __init__(self, what: str, size: int, cap: int):
        super().__init__(f"{what}: size {size} exceeds cap {cap}")
        self.size = size
        self.cap = cap


class ConstraintError(GNCGError, ValueError):
    """Generator parameters violate the construction's preconditions."""


class ParseError(GNCGError, ValueError):
    """Malformed input document; ``field`` names the offending location."""

    def __init__(self, message: str, field: str | None = None, line: int | None = None):
        where = []
        if line is not None:
            where.append(f"line {line}")
        if field is not None:
            where.append(f"field {field}")
        super().__init__(f"{message} ({', '.join(where)})" if where else message)
        self.field = field
        self.line = line
