"""Exception hierarchy shared across the package.

Exit-code contract for the CLI: DomainError (and subclasses) -> 1,
CapacityError -> 2.
"""


class SimulationError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(SimulationError, ValueError):
    """Invalid parameter, state, or argument combination."""


class ConfigError(DomainError):
    """Malformed or inconsistent configuration input."""


class CapacityError(SimulationError):
    """Requested problem exceeds a hard size or memory limit."""


class PropagationError(SimulationError):
    """Time stepping failed (step too large, norm lost, ...)."""
