"""Exception hierarchy shared by every module."""

from __future__ import annotations


class RLSheafError(Exception):
    """Base class for all library errors."""


class FormatError(RLSheafError):
    """Malformed input: wrong arity, unknown labels, missing assignments."""


class PreconditionError(RLSheafError):
    """An operation was called on inputs that violate its precondition."""

    def __init__(self, message: str, witness: dict | None = None):
        super().__init__(message)
        self.witness = witness or {}


class BudgetExceeded(RLSheafError):
    """An exhaustive enumeration would exceed its configured size guard."""
