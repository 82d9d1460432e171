"""Domain types for the sphere-plane system.

Everything downstream works in reduced units: lengths in units of the sphere
radius ``a``, energies in units of ``hbar * omega_p`` and forces in units of
``hbar * omega_p / a``. The geometry enters only through ``z/a`` and the
substrate only through the contrast factor ``f_c``.
"""

import cmath
import logging
import math
import numbers
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Optional, Union

from .helpers import ConfigError, UnphysicalEigenvalueError

__all__ = [
    "Geometry",
    "SubstrateContrast",
    "DrudeSphere",
    "ForceMethod",
    "SolverConfig",
    "SUBSTRATE_PRESETS",
    "spectral_variable_of_frequency",
    "mode_frequency_of_eigenvalue",
    "dielectric_of_spectral_variable",
    "drude_permittivity",
    "multipole_polarizability",
]

logger = logging.getLogger(__name__)

DAMPING_WARN_RATIO = 0.01

# Static optical permittivity used for the "sapphire" preset. It is a
# configurable placeholder, not a fitted material value.
SAPPHIRE_PERMITTIVITY = 3.1


@dataclass(frozen=True)
class Geometry:
    """Sphere of radius ``a`` whose surface is a gap ``z`` above the substrate.

    :param gap_over_radius: dimensionless gap z/a, must be positive and finite
    :type gap_over_radius: float
    """

    gap_over_radius: float

    def __post_init__(self):
        """Check the gap is a positive finite number."""
        value = self.gap_over_radius
        if not isinstance(value, numbers.Real) or not math.isfinite(value) or value <= 0:
            raise ConfigError(f"gap_over_radius must be a positive finite number, got {value!r}")

    @classmethod
    def from_lengths(cls, radius: float, gap: float) -> "Geometry":
        """Build the reduced geometry from a radius and a gap in the same units."""
        if radius <= 0:
            raise ConfigError(f"sphere radius must be positive, got {radius!r}")
        return cls(gap / radius)

    @property
    def center_distance(self) -> float:
        """Distance from the sphere centre to the plane, in units of ``a``."""
        return 1.0 + self.gap_over_radius

    @property
    def x(self) -> float:
        """Image ratio a / (2(z + a)); always in (0, 1/2)."""
        return 0.5 / self.center_distance

    @property
    def log_x(self) -> float:
        """Natural log of :attr:`x`, evaluated without forming ``x`` first."""
        return -math.log(2.0) - math.log1p(self.gap_over_radius)

    def dlog_x(self) -> float:
        """Derivative of ln(x) with respect to z/a."""
        return -1.0 / self.center_distance


@dataclass(frozen=True)
class SubstrateContrast:
    """Image strength of the substrate, f_c = (1 - eps_p) / (1 + eps_p).

    :param f_c: real contrast factor in [-1, 1); -1 is a perfect conductor
    :type f_c: float
    """

    f_c: float

    def __post_init__(self):
        """Check the contrast factor range."""
        value = self.f_c
        if not isinstance(value, numbers.Real) or not math.isfinite(value):
            raise ConfigError(f"f_c must be a finite real number, got {value!r}")
        if not -1.0 <= value < 1.0:
            raise ConfigError(f"f_c must lie in [-1, 1), got {value!r}")

    @classmethod
    def from_permittivity(cls, eps_p: float) -> "SubstrateContrast":
        """Contrast factor of a substrate with a real permittivity.

        ``math.inf`` gives the perfect conductor.
        """
        if math.isinf(eps_p) and eps_p > 0:
            return cls(-1.0)
        if eps_p == -1.0:
            raise ConfigError("eps_p = -1 is the surface-plasmon pole, f_c is undefined")
        return cls((1.0 - eps_p) / (1.0 + eps_p))

    @classmethod
    def preset(cls, name: str) -> "SubstrateContrast":
        """Look up a named substrate."""
        try:
            return SUBSTRATE_PRESETS[name]
        except KeyError as e:
            names = ", ".join(sorted(SUBSTRATE_PRESETS))
            raise ConfigError(f"Unknown substrate `{name}`, expected one of: {names}") from e

    @property
    def is_perfect_conductor(self) -> bool:
        """True for the f_c = -1 limit."""
        return self.f_c == -1.0


SUBSTRATE_PRESETS = {
    "perfect_conductor": SubstrateContrast(-1.0),
    "sapphire": SubstrateContrast((1.0 - SAPPHIRE_PERMITTIVITY) / (1.0 + SAPPHIRE_PERMITTIVITY)),
}


@dataclass(frozen=True)
class DrudeSphere:
    """Drude sphere, eps_s(w) = 1 - w_p^2 / [w (w + i/tau)].

    :param plasma_frequency_relative: w_p, defaults to 1 since outputs are reduced by hbar w_p
    :type plasma_frequency_relative: float
    :param damping_ratio: 1/(tau w_p), defaults to 0 (lossless)
    :type damping_ratio: float
    """

    plasma_frequency_relative: float = 1.0
    damping_ratio: float = 0.0

    def __post_init__(self):
        """Validate and warn when the lossless energy formula is stretched."""
        if not self.plasma_frequency_relative > 0:
            raise ConfigError(
                f"plasma frequency must be positive, got {self.plasma_frequency_relative!r}"
            )
        if not self.damping_ratio >= 0:
            raise ConfigError(f"damping_ratio must be nonnegative, got {self.damping_ratio!r}")
        if self.damping_ratio > DAMPING_WARN_RATIO:
            logger.warning(
                "damping_ratio=%g exceeds %g; zero-point energies use the lossless approximation",
                self.damping_ratio,
                DAMPING_WARN_RATIO,
            )

    @property
    def inverse_tau(self) -> float:
        """Relaxation rate 1/tau in the same units as the plasma frequency."""
        return self.damping_ratio * self.plasma_frequency_relative


class ForceMethod(Enum):
    """How :func:`sphereplate.spectral.casimir_force` differentiates the energy."""

    HELLMANN_FEYNMAN = "hellmann_feynman"
    FINITE_DIFFERENCE = "finite_difference"
    BOTH = "both"

    @classmethod
    def parse(cls, value: Union[str, "ForceMethod"]) -> "ForceMethod":
        """Accept the enum, its value, or the short CLI names ``hf``/``fd``/``both``."""
        if isinstance(value, cls):
            return value
        aliases = {"hf": cls.HELLMANN_FEYNMAN, "fd": cls.FINITE_DIFFERENCE}
        key = str(value).strip().lower()
        if key in aliases:
            return aliases[key]
        try:
            return cls(key)
        except ValueError as e:
            raise ConfigError(f"Unknown force method `{value}`") from e


@dataclass(frozen=True)
class SolverConfig:
    """Truncation and convergence settings for the spectral solver.

    :param l_max: highest multipole order kept (cap when truncation is adaptive)
    :type l_max: int
    :param m_max: highest azimuthal order kept, defaults to ``l_max``
    :type m_max: Optional[int]
    :param energy_rel_tol: relative energy tolerance for adaptive truncation
    :type energy_rel_tol: float
    :param adaptive_truncation: grow ``l_max`` by doubling until converged
    :type adaptive_truncation: bool
    :param force_method: how the force is computed
    :type force_method: ForceMethod
    :param fd_step_rel: relative step in z/a for finite differences
    :type fd_step_rel: float
    :param pole_epsilon: closest allowed distance to a pole in Green's functions
    :type pole_epsilon: float
    """

    l_max: int = 32
    m_max: Optional[int] = None
    energy_rel_tol: float = 1e-6
    adaptive_truncation: bool = False
    force_method: ForceMethod = ForceMethod.HELLMANN_FEYNMAN
    fd_step_rel: float = 1e-4
    pole_epsilon: float = 1e-12
    start_l_max: int = field(default=8, repr=False)

    def __post_init__(self):
        """Fill ``m_max`` and check the invariants."""
        l_max = self.l_max
        if isinstance(l_max, bool) or not isinstance(l_max, numbers.Integral) or l_max < 1:
            raise ConfigError(f"l_max must be an integer >= 1, got {self.l_max!r}")
        if self.m_max is None:
            object.__setattr__(self, "m_max", self.l_max)
        if not isinstance(self.m_max, numbers.Integral) or not 0 <= self.m_max <= self.l_max:
            raise ConfigError(f"m_max must be an integer in [0, l_max], got {self.m_max!r}")
        if not self.energy_rel_tol > 0:
            raise ConfigError(f"energy_rel_tol must be positive, got {self.energy_rel_tol!r}")
        if not self.fd_step_rel > 0:
            raise ConfigError(f"fd_step_rel must be positive, got {self.fd_step_rel!r}")
        if not self.pole_epsilon > 0:
            raise ConfigError(f"pole_epsilon must be positive, got {self.pole_epsilon!r}")
        object.__setattr__(self, "force_method", ForceMethod.parse(self.force_method))

    def truncated(self, l_max: int, m_max: Optional[int] = None) -> "SolverConfig":
        """Copy with a different truncation; ``m_max`` is clipped to ``l_max``."""
        m_max = min(self.m_max if m_max is None else m_max, l_max)
        return replace(self, l_max=l_max, m_max=m_max)


def spectral_variable_of_frequency(sphere: DrudeSphere, omega: complex) -> complex:
    """Spectral variable u(w) = w (w + i/tau) / w_p^2 of a Drude sphere."""
    omega = complex(omega)
    return omega * (omega + 1j * sphere.inverse_tau) / sphere.plasma_frequency_relative**2


def mode_frequency_of_eigenvalue(sphere: DrudeSphere, n_s: float) -> complex:
    """Proper-mode frequency belonging to the eigenvalue ``n_s`` of H.

    w_s = -i/(2 tau) + sqrt((i/(2 tau))^2 + w_p^2 n_s), which is w_p sqrt(n_s)
    for a lossless sphere.

    :raises UnphysicalEigenvalueError: if ``n_s`` is not in (0, 1)
    """
    if not 0.0 < n_s < 1.0:
        raise UnphysicalEigenvalueError(f"eigenvalue {n_s!r} outside (0, 1)", value=n_s)
    omega_p = sphere.plasma_frequency_relative
    if sphere.damping_ratio == 0.0:
        return complex(omega_p * math.sqrt(n_s), 0.0)
    half_rate = 0.5j * sphere.inverse_tau
    return -half_rate + cmath.sqrt(half_rate**2 + omega_p**2 * n_s)


def dielectric_of_spectral_variable(u: complex) -> complex:
    """Invert u = 1/(1 - eps_s)."""
    if u == 0:
        raise ConfigError("u = 0 corresponds to an infinite permittivity")
    return 1.0 - 1.0 / u


def drude_permittivity(sphere: DrudeSphere, omega: complex) -> complex:
    """Drude dielectric function of the sphere at frequency ``omega``."""
    u = spectral_variable_of_frequency(sphere, omega)
    return dielectric_of_spectral_variable(u)


def multipole_polarizability(l: int, u: complex) -> complex:  # noqa: E741
    """Reduced polarizability alpha_l / a^(2l+1) = n_l0 / (n_l0 - u) of a sphere."""
    if l < 1:
        raise ConfigError(f"multipole order must be >= 1, got {l!r}")
    n_l0 = l / (2 * l + 1)
    if u == n_l0:
        raise ConfigError(f"u = {u!r} sits on the isolated-sphere resonance of order {l}")
    return n_l0 / (n_l0 - u)
