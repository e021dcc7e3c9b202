"""Exception types raised by the solver."""


class EvolutionError(Exception):
    """Base class for all solver errors."""


class DimensionError(EvolutionError, ValueError):
    """Spatial dimensions of two objects disagree."""


class DomainError(EvolutionError, ValueError):
    """An argument lies outside the domain of an operation."""


class PreconditionError(EvolutionError):
    """A mathematical precondition of an operation does not hold.

    ``field`` optionally names the problem component at fault
    (``"symbol"``, ``"source"``, ``"initial"``).
    """

    def __init__(self, message, field=None):
        self.field = field
        super().__init__(message)


class RepresentationError(EvolutionError):
    """The requested object cannot be expressed in the discrete measure class."""


class QuadratureError(EvolutionError):
    """Adaptive quadrature failed to reach its tolerance."""


class ConfigError(EvolutionError):
    """Invalid experiment configuration. ``path`` names the offending entry."""

    def __init__(self, path, message):
        self.path = path
        super().__init__(f"{path}: {message}")
