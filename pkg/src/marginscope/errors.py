"""Exception types shared across the package.

Every error carries the name of the module it originated from so the CLI
can surface a single-line diagnostic and map it to an exit code.
"""

from __future__ import annotations


class MarginScopeError(Exception):
    """Base class for package errors."""

    def __init__(self, message: str, module: str = "marginscope"):
        super().__init__(message)
        self.module = module


class InvalidInputError(MarginScopeError):
    """A precondition on user-supplied data was violated."""


class ResourceCapError(MarginScopeError):
    """An exact computation would exceed its configured resource cap.

    Raised instead of silently truncating or approximating.
    """


class InfeasibleError(MarginScopeError):
    """A requested quantity does not exist for the given inputs."""
