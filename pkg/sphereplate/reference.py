"""Comparison models for the full spectral solver.

The dipolar and quadrupolar truncations, the proximity-theorem force and the
leading Casimir-Polder term are all cheap closed forms or tiny eigenproblems,
used to check the full solver and to overlay curves in sweeps.
"""

import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Sequence, Union

import numpy as np

from .helpers import ConfigError
from .model import ForceMethod, Geometry, SolverConfig, SubstrateContrast
from .spectral import energy_and_force

__all__ = [
    "WINDOW_TOLERANCE",
    "CurveLabel",
    "PlateEnergyModel",
    "ComparisonCurve",
    "dipole_modes",
    "dipole_energy_force",
    "quadrupole_energy_force",
    "proximity_force",
    "effective_radius",
    "casimir_polder_energy",
    "casimir_polder_force",
    "comparison_curve",
]

logger = logging.getLogger(__name__)

# Relative force tolerance for the windows where the dipole (z/a > 7) and
# quadrupole (2 <= z/a <= 7) truncations stand in for the full model.
WINDOW_TOLERANCE = 0.05

ISOLATED_DIPOLE = 1.0 / 3.0

# (b, degeneracy) for the dipolar modes: m = +-1 twice, m = 0 once
_DIPOLE_BRANCHES = ((1, 2), (2, 1))


class CurveLabel(Enum):
    """Which model a comparison curve comes from."""

    DIPOLE = "dipole"
    QUADRUPOLE = "quadrupole"
    FULL = "full"
    PROXIMITY_VDW = "proximity_vdw"
    PROXIMITY_IDEAL = "proximity_ideal"
    CASIMIR_POLDER = "casimir_polder"


class PlateEnergyModel(Enum):
    """Plate-plate energy per area used by the proximity theorem."""

    IDEAL_RETARDED = "ideal_retarded"
    VDW_NONRETARDED = "vdw_nonretarded"

    @property
    def exponent(self) -> int:
        """Power of the gap in the plate energy, V ~ -C / z**p."""
        return 3 if self is PlateEnergyModel.IDEAL_RETARDED else 2

    @classmethod
    def parse(cls, value: Union[str, "PlateEnergyModel"]) -> "PlateEnergyModel":
        """Accept the enum, its value, or ``ideal``/``vdw``."""
        if isinstance(value, cls):
            return value
        aliases = {"ideal": cls.IDEAL_RETARDED, "vdw": cls.VDW_NONRETARDED}
        key = str(value).strip().lower()
        if key in aliases:
            return aliases[key]
        try:
            return cls(key)
        except ValueError as e:
            raise ConfigError(f"Unknown plate energy model `{value}`") from e


@dataclass(frozen=True)
class ComparisonCurve:
    """One curve of a sweep.

    :param label: model that produced the curve
    :type label: CurveLabel
    :param quantity: ``"energy"`` or ``"force"``
    :type quantity: str
    :param rows: ``(z/a, value)`` sorted by strictly increasing z/a
    :type rows: tuple[tuple[float, float], ...]
    """

    label: CurveLabel
    quantity: str
    rows: tuple[tuple[float, float], ...]

    def __post_init__(self):
        """Check the rows are ordered."""
        zs = [row[0] for row in self.rows]
        if any(b <= a for a, b in zip(zs, zs[1:])):
            raise ConfigError("comparison curve rows must have strictly increasing z/a")

    @property
    def separations(self) -> np.ndarray:
        """The z/a column."""
        return np.array([row[0] for row in self.rows])

    @property
    def values(self) -> np.ndarray:
        """The energy or force column."""
        return np.array([row[1] for row in self.rows])


def dipole_modes(geom: Geometry, contrast: SubstrateContrast) -> tuple[float, float, float]:
    """The three dipolar eigenvalues (1/3)(1 + b f_c x^3), b = 1, 1, 2."""
    x3 = geom.x**3
    low = ISOLATED_DIPOLE * (1.0 + contrast.f_c * x3)
    high = ISOLATED_DIPOLE * (1.0 + 2.0 * contrast.f_c * x3)
    return low, low, high


def dipole_energy_force(geom: Geometry, contrast: SubstrateContrast) -> tuple[float, float]:
    """Closed-form energy and force of the dipole-only model.

    The force is the analytic derivative
    F = sum_b deg_b f_c b x^3 / (4 sqrt(n_b) (1 + z/a)).

    :param geom: sphere-plane geometry
    :type geom: Geometry
    :param contrast: substrate contrast factor
    :type contrast: SubstrateContrast
    :return: reduced energy and reduced force
    :rtype: tuple[float, float]
    """
    x3 = geom.x**3
    root0 = math.sqrt(ISOLATED_DIPOLE)
    energy_terms = []
    force_terms = []
    for b, degeneracy in _DIPOLE_BRANCHES:
        shift = ISOLATED_DIPOLE * b * contrast.f_c * x3
        root = math.sqrt(ISOLATED_DIPOLE + shift)
        energy_terms.append(0.5 * degeneracy * shift / (root + root0))
        force_terms.append(degeneracy * b * contrast.f_c * x3 / (4.0 * root * geom.center_distance))
    return math.fsum(energy_terms), math.fsum(force_terms)


def quadrupole_energy_force(
    geom: Geometry,
    contrast: SubstrateContrast,
    force_method: ForceMethod = ForceMethod.HELLMANN_FEYNMAN,
) -> tuple[float, float]:
    """Full spectral solver truncated at l_max = 2 with every m block."""
    point = energy_and_force(
        geom, contrast, SolverConfig(l_max=2, force_method=force_method)
    )
    return point.energy.energy_reduced, point.force.force_reduced


def effective_radius(radius: float, second_radius: Optional[float] = None) -> float:
    """Derjaguin radius R1 R2 / (R1 + R2); a missing second radius is a plane."""
    if radius <= 0:
        raise ConfigError(f"radius must be positive, got {radius!r}")
    if second_radius is None:
        return radius
    if second_radius <= 0:
        raise ConfigError(f"second radius must be positive, got {second_radius!r}")
    return radius * second_radius / (radius + second_radius)


def proximity_force(
    geom: Geometry,
    plate_energy_model: Union[str, PlateEnergyModel],
    coefficient: float,
    radius: float = 1.0,
    second_radius: Optional[float] = None,
) -> float:
    """Proximity-theorem force F = 2 pi R V(z).

    V(z) = -coefficient / z**2 for the non-retarded van der Waals plates and
    -coefficient / z**3 for ideal retarded plates, with z = (z/a) * radius.
    The result is in whatever units ``coefficient`` and ``radius`` carry; it
    is a scaling comparator and is never compared to the reduced solver in
    magnitude.

    :param geom: sphere-plane geometry
    :type geom: Geometry
    :param plate_energy_model: plate-plate energy law
    :type plate_energy_model: Union[str, PlateEnergyModel]
    :param coefficient: positive prefactor of the plate energy
    :type coefficient: float
    :param radius: sphere radius, defaults to 1
    :type radius: float, optional
    :param second_radius: radius of the second body, defaults to a plane
    :type second_radius: Optional[float], optional
    :raises ConfigError: on a nonpositive coefficient or radius
    :return: the force, negative for attraction
    :rtype: float
    """
    model = PlateEnergyModel.parse(plate_energy_model)
    if not coefficient > 0:
        raise ConfigError(f"proximity coefficient must be positive, got {coefficient!r}")
    r_eff = effective_radius(radius, second_radius)
    gap = geom.gap_over_radius * radius
    return -2.0 * math.pi * r_eff * coefficient / gap**model.exponent


def casimir_polder_energy(geom: Geometry, contrast: SubstrateContrast) -> float:
    """Leading large-separation energy f_c x^3 / sqrt(3)."""
    return contrast.f_c * geom.x**3 / math.sqrt(3.0)


def casimir_polder_force(geom: Geometry, contrast: SubstrateContrast) -> float:
    """Leading large-separation force sqrt(3) f_c x^3 / (1 + z/a); beta = 4."""
    return math.sqrt(3.0) * contrast.f_c * geom.x**3 / geom.center_distance


def comparison_curve(
    label: Union[str, CurveLabel],
    grid: Sequence[float],
    contrast: SubstrateContrast,
    quantity: str = "force",
    solver: Optional[SolverConfig] = None,
    pt_coefficient: float = 1.0,
    threads: int = 1,
) -> ComparisonCurve:
    """Evaluate one model over a grid of z/a.

    :param label: model to evaluate
    :type label: Union[str, CurveLabel]
    :param grid: strictly increasing z/a values
    :type grid: Sequence[float]
    :param contrast: substrate contrast factor
    :type contrast: SubstrateContrast
    :param quantity: ``"energy"`` or ``"force"``, defaults to "force"
    :type quantity: str, optional
    :param solver: settings for the full model, defaults to ``SolverConfig()``
    :type solver: Optional[SolverConfig], optional
    :param pt_coefficient: proximity-theorem prefactor, defaults to 1
    :type pt_coefficient: float, optional
    :param threads: worker threads for the full model, defaults to 1
    :type threads: int, optional
    :raises ConfigError: on an unknown label or quantity, or energy of a proximity curve
    :return: the curve
    :rtype: ComparisonCurve
    """
    try:
        label = CurveLabel(label)
    except ValueError as e:
        raise ConfigError(f"Unknown curve `{label}`") from e
    if quantity not in ("energy", "force"):
        raise ConfigError(f"quantity must be energy or force, got `{quantity}`")
    index = 0 if quantity == "energy" else 1
    solver = solver or SolverConfig()

    def evaluate(z: float) -> float:
        geom = Geometry(z)
        if label is CurveLabel.DIPOLE:
            return dipole_energy_force(geom, contrast)[index]
        if label is CurveLabel.QUADRUPOLE:
            return quadrupole_energy_force(geom, contrast, solver.force_method)[index]
        if label is CurveLabel.CASIMIR_POLDER:
            if index == 0:
                return casimir_polder_energy(geom, contrast)
            return casimir_polder_force(geom, contrast)
        if label is CurveLabel.FULL:
            point = energy_and_force(geom, contrast, solver, threads=threads)
            return point.energy.energy_reduced if index == 0 else point.force.force_reduced
        if index == 0:
            raise ConfigError("proximity curves only provide forces")
        model = (
            PlateEnergyModel.VDW_NONRETARDED
            if label is CurveLabel.PROXIMITY_VDW
            else PlateEnergyModel.IDEAL_RETARDED
        )
        return proximity_force(geom, model, pt_coefficient)

    rows = tuple((float(z), float(evaluate(float(z)))) for z in grid)
    logger.debug("%s %s curve over %d points", label.value, quantity, len(rows))
    return ComparisonCurve(label=label, quantity=quantity, rows=rows)
