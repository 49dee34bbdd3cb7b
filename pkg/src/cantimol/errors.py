"""Exception classes shared across the package.

Each class maps to one CLI exit-code family, see cli.py.
"""


class CantimolError(Exception):
    """Base class for package errors."""


class ConfigParseError(CantimolError):
    """Malformed config text (bad syntax, unknown key). Carries a line number."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class ValidationError(CantimolError):
    """A domain-type invariant or config constraint is violated."""


class NumericalError(CantimolError):
    """A numerical routine failed (non-convergence, residual too large)."""


class CutoffLimitedError(CantimolError):
    """A truncated-basis run left too much probability near the cutoff."""
