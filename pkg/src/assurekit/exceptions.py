"""Exception types shared across the package."""


class AssureKitError(Exception):
    """Base class for all package-specific errors."""


class DomainError(AssureKitError, ValueError):
    """An argument lies outside its mathematical domain."""


class ConditioningError(AssureKitError):
    """Conditioning on a probability-zero event."""


class ConvergenceError(AssureKitError):
    """An iterative solver failed to converge within its budget."""

    def __init__(self, message, last_value=None, residual=None, iterations=None):
        super().__init__(message)
        self.last_value = last_value
        self.residual = residual
        self.iterations = iterations


class DegenerateUpdateError(AssureKitError):
    """A Bayesian update conditioned on an event of probability 0 or 1."""


class RegionMismatchError(AssureKitError):
    """A mechanism-comparison quantity was requested outside its region."""


class NoEquilibriumError(AssureKitError):
    """No sign change found when bracketing an equilibrium cutoff."""


class InstabilityError(AssureKitError):
    """Implicit-function-theorem derivative requested at an unstable root."""


class ConfigError(AssureKitError):
    """Invalid run configuration (unknown preset, bad range, malformed JSON)."""
