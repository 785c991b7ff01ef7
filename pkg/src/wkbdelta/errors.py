"""Exception hierarchy shared by all modules."""


class WKBDeltaError(Exception):
    """Base class for errors raised by this package."""


class DomainError(WKBDeltaError, ValueError):
    """An argument lies outside the domain of the operation."""


class UnsupportedMapError(WKBDeltaError):
    """The requested change of variables is not defined for this potential."""


class AccuracyError(WKBDeltaError):
    """A numerical procedure stopped before reaching the requested tolerance.

    The best available estimate and its error bound are kept so callers can
    decide whether the result is still usable.
    """

    def __init__(self, message, estimate=None, error=None):
        super().__init__(message)
        self.estimate = estimate
        self.error = error


class PMSFailure(WKBDeltaError):
    """No admissible stationary point of the first-order expansion."""


class SolverError(WKBDeltaError):
    """Root bracketing or iteration failed."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class FormulaRangeError(WKBDeltaError):
    """A closed-form spectrum formula was evaluated outside its range."""

    def __init__(self, message, n=None):
        super().__init__(message)
        self.n = n


class ConvergenceError(WKBDeltaError):
    """Basis-size iteration of the diagonalization oracle did not converge."""

    def __init__(self, message, converged=None):
        super().__init__(message)
        self.converged = converged or []


class DivergenceError(DomainError):
    """The requested sum does not converge."""
