"""Exception hierarchy shared across the package."""


class SpikecovError(Exception):
    """Base class for all package-specific errors."""


class DomainError(SpikecovError):
    """Argument lies outside the mathematical domain of an operation."""


class PoleError(DomainError):
    """Evaluation point coincides with a pole (an eigenvalue or zero)."""


class NoRootError(SpikecovError):
    """A required root does not exist on the search branch."""


class NoVarianceError(SpikecovError):
    """Target moments have non-positive variance; a spread model cannot fit."""


class ConvergenceError(SpikecovError):
    """Iterative solver failed to reach the requested residual."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class CapExceeded(SpikecovError):
    """Requested order is beyond the supported practical cap."""


class EmptyTail(SpikecovError):
    """No eigenvalues remain after trimming."""


class ParseError(SpikecovError):
    """Input file contains a malformed cell; coordinates are 1-based."""

    def __init__(self, message, row=None, col=None):
        super().__init__(message)
        self.row = row
        self.col = col


class ShapeError(SpikecovError):
    """Input file is not rectangular."""


class DegenerateInput(SpikecovError):
    """Input matrix is too degenerate to produce a usable spectrum."""
