"""Exception types shared across the package."""


class MemfunError(Exception):
    """Base class for all package-specific errors."""


class InvalidParameter(MemfunError, ValueError):
    """A constructor argument violates its stated precondition."""


class NonConvergence(MemfunError, RuntimeError):
    """Adaptive quadrature hit its refinement cap without meeting tolerance.

    Carries the best value and error estimate reached so callers can decide
    whether the partial result is still usable.
    """

    def __init__(self, message, value=None, error_estimate=None):
        super().__init__(message)
        self.value = value
        self.error_estimate = error_estimate


class UnsupportedKernelClass(MemfunError, ValueError):
    """Kernel does not belong to the class required by the operation."""


class DegenerateInput(MemfunError, ValueError):
    """Input is degenerate for the requested analysis (e.g. the zero signal)."""


class ConfigError(MemfunError, ValueError):
    """A config file or CLI argument could not be validated."""
