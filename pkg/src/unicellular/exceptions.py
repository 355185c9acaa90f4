"""Exception types raised by :mod:`unicellular`."""


class UnicellularError(Exception):
    """Base class for all errors raised by this package."""


class ShapeError(UnicellularError, ValueError):
    """Raised when a matrix has the wrong shape or an index is out of range."""


class ConvergenceError(UnicellularError):
    """Raised when an iterative method stops before meeting its tolerance."""

    def __init__(self, msg, iterations=None, last=None):
        super().__init__(msg)
        self.iterations = iterations
        self.last = last


class NumericalRankError(UnicellularError):
    """Raised when a rank decision falls inside the ambiguity band."""


class NotInAlgebraError(UnicellularError):
    """Raised when a matrix is not a polynomial in the given generator."""


class HypothesisError(UnicellularError, ValueError):
    """Raised when an input violates the hypotheses an algorithm depends on.

    For reconstruction this means a hidden matrix without a constant
    diagonal or with a vanishing superdiagonal entry.
    """


class OracleInconsistencyError(UnicellularError):
    """Raised when norm values cannot come from any admissible matrix."""


class AmbiguityError(UnicellularError):
    """Raised when several parameter values explain the data equally well."""


class BudgetError(UnicellularError, ValueError):
    """Raised when a requested enumeration exceeds the configured budget."""


class ReconstructionError(UnicellularError):
    """Wraps a failure inside :func:`unicellular.reconstruct.reconstruct`.

    ``step`` names the stage that failed, e.g. ``"order 5, step 3"``.
    """

    def __init__(self, msg, step=None):
        super().__init__(f"{step}: {msg}" if step else msg)
        self.step = step
