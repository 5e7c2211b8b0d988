"""Exception hierarchy for g2moduli.

Numerical step failure is deliberately absent: an integration that cannot
continue ends with ``Termination.STEP_FAILURE`` and is classified, not raised.
"""


class G2ModuliError(Exception):
    """Base class for all g2moduli errors."""
    pass


class DomainError(G2ModuliError, ValueError):
    """Raised when an argument lies outside the domain of an operation (r < 1, t <= 0, ...)."""
    pass


class SingularPointError(DomainError):
    """Raised when a right-hand side is evaluated where it is singular (A = 0 or t = 0).

    Solutions are seeded from their series at t0 > 0 instead.
    """
    pass


class UnsupportedWeightError(DomainError):
    """Raised by the index table for the critical weight -2 or weights outside (-4, 0)."""
    pass


class FitError(G2ModuliError):
    """Raised when a trajectory tail is too short for the decay fit."""
    pass


class BracketError(G2ModuliError, ValueError):
    """Raised when a boundary bracket does not straddle the moduli boundary."""
    pass


class ConfigError(G2ModuliError):
    """Raised when a configuration file cannot be read or fails validation."""
    pass
