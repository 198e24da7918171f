from __future__ import annotations


class ObsGamesError(Exception):
    """Base class for all library errors."""


class ParseError(ObsGamesError, ValueError):
    """Syntax error in a text input, with 1-based line and column."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f"line {line}" + (f", column {column}" if column is not None else "") + ": "
        super().__init__(where + message)


class GameValidationError(ObsGamesError, ValueError):
    """A game violates a structural invariant (disjoint actions, total tables, ...)."""


class ResourceLimitError(ObsGamesError):
    """An enumeration would exceed its configured cap."""


class UnsupportedFeature(ObsGamesError):
    """The request is valid in general but not supported in the chosen mode."""


class IncoherentBase(ObsGamesError):
    """An extension query was posed on an observable game that is not coherent."""
