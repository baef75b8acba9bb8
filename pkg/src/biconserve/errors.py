"""Exception types raised by the workbench."""


class BiconserveError(Exception):
    """Base class for all workbench errors."""


class DomainError(BiconserveError, ValueError):
    """Input falls on or too close to a singular set (c - K <= eps, K' <= eps, ...)."""


class GridTooSmallError(BiconserveError, ValueError):
    """Grid has too few samples along an axis for the requested stencil."""


class MismatchError(BiconserveError, ValueError):
    """Two inputs that must share a grid or a sample set do not."""


class InfeasibleError(DomainError):
    """Exponent data violates c - K_r > 0.

    ``indices`` lists the offending sample positions.
    """

    def __init__(self, message, indices=()):
        super().__init__(message)
        self.indices = list(indices)


class ConvergenceError(BiconserveError, RuntimeError):
    """An iterative solver failed to reach its tolerance."""

    def __init__(self, message, best=None, history=()):
        super().__init__(message)
        self.best = best
        self.history = list(history)


class ConfigError(BiconserveError, ValueError):
    """Invalid run configuration; ``field`` names the offending entry."""

    def __init__(self, field, message):
        super().__init__(f"{field}: {message}")
        self.field = field
