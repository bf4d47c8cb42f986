"""Shared exception types.

Every user-facing failure is one of two kinds: the input was malformed
(InputError, CLI exit code 2) or an exact search ran out of its configured
budget (BudgetExceededError, CLI exit code 1).  Everything else is a bug.
"""

from __future__ import annotations


class XclabError(Exception):
    """Base class for all package errors."""


class InputError(XclabError):
    """Malformed or inconsistent input (wrong shape, parity, range, ...)."""


class BudgetExceededError(XclabError):
    """An exact search exceeded its node or size budget."""


class NotAnExtensionError(XclabError):
    """A claimed extension has a polytope vertex that admits no lift."""

    def __init__(self, vertex_index: int, message: str | None = None):
        self.vertex_index = vertex_index
        super().__init__(message or f"vertex {vertex_index} has no lift in the extension")


class NotDerivableError(XclabError):
    """An inequality of the target polytope is not a conic combination of
    the extension's constraint system."""

    def __init__(self, row_index: int, message: str | None = None):
        self.row_index = row_index
        super().__init__(
            message
            or f"inequality row {row_index} is not derivable from the extension system"
        )
