"""Exception hierarchy.

The CLI maps these onto exit codes: configuration problems exit 1,
physics-domain problems exit 2, numerical failures exit 3.
"""


class GIEError(Exception):
    exit_code = 3


class ConfigError(GIEError, ValueError):
    """Malformed or inconsistent input parameters."""

    exit_code = 1


class DomainError(GIEError, ValueError):
    """Parameters outside the region where the model is defined."""

    exit_code = 2


class UnsupportedError(GIEError):
    """A formula requested outside the regime where it was derived."""

    exit_code = 2


class NoSolutionError(GIEError):
    """A root-finding request has no solution (e.g. no entanglement)."""

    exit_code = 2


class GridError(GIEError):
    """A frequency or time grid cannot resolve the features it must."""

    exit_code = 3


class ResolutionError(GIEError):
    """A discretisation budget cannot meet its accuracy target."""

    exit_code = 3


class QuadratureError(GIEError):
    """Adaptive quadrature missed its tolerance.

    ``worst_interval`` is the (a, b) sub-interval with the largest error
    estimate, ``error`` the estimate itself.
    """

    exit_code = 3

    def __init__(self, message, worst_interval=None, error=None):
        super().__init__(message)
        self.worst_interval = worst_interval
        self.error = error
