"""Shared aliases, environment defaults and the error hierarchy."""

import os
from typing import Optional, Sequence, Union

import numpy as np

__all__ = [
    "Real",
    "Options",
    "Matrix",
    "SpherePlateError",
    "ConfigError",
    "ConvergenceError",
    "NumericalError",
    "UnphysicalEigenvalueError",
    "PoleProximityError",
    "EigensolverError",
    "SignChangeError",
    "exit_code",
]

Real = Union[float, int]
Options = Union[bool, str, int, float]
Matrix = np.ndarray

VERSION = "0.1.0"

ENVIRONMENT_DEFAULTS = {
    "SPHEREPLATE_LOG_LEVEL": "warning",
    "SPHEREPLATE_THREADS": "1",
}

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_CONVERGENCE = 3
EXIT_NUMERICAL = 4


class SpherePlateError(Exception):
    """Base class for every error raised by the package."""

    exit_code = EXIT_NUMERICAL


class ConfigError(SpherePlateError, ValueError):
    """Invalid input: type invariants, options, presets or index contracts."""

    exit_code = EXIT_CONFIG


class ConvergenceError(SpherePlateError):
    """An iterative procedure hit its cap before reaching the tolerance.

    :param message: description of what failed to converge
    :type message: str
    :param partials: last values produced before giving up, defaults to ()
    :type partials: Sequence[float], optional
    """

    exit_code = EXIT_CONVERGENCE

    def __init__(self, message: str, partials: Sequence[float] = ()):
        """Keep the last partial values next to the message."""
        super().__init__(message)
        self.partials = tuple(partials)


class NumericalError(SpherePlateError):
    """Numerical failure inside the solver."""

    exit_code = EXIT_NUMERICAL


class UnphysicalEigenvalueError(NumericalError):
    """Eigenvalue of H outside the physical range (0, 1)."""

    def __init__(self, message: str, value: Optional[float] = None, m: Optional[int] = None):
        """Record the offending eigenvalue and its azimuthal block."""
        super().__init__(message)
        self.value = value
        self.m = m


class PoleProximityError(NumericalError):
    """Green's function requested too close to one of its poles."""


class EigensolverError(NumericalError):
    """The dense symmetric eigensolver failed on a block."""

    def __init__(self, message: str, m: int, l_max: int):
        """Name the block that failed."""
        super().__init__(f"{message} (block m={m}, l_max={l_max})")
        self.m = m
        self.l_max = l_max


class SignChangeError(NumericalError):
    """A force sweep crossed zero where a definite sign was expected."""


def exit_code(error: BaseException) -> int:
    """Map an exception onto the command line exit status."""
    return getattr(error, "exit_code", EXIT_NUMERICAL)


def set_environ_defaults() -> None:
    """Fill in environment defaults that are not already set."""
    for key, value in ENVIRONMENT_DEFAULTS.items():
        if os.getenv(key) is None:
            os.environ[key] = value

