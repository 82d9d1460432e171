"""Non-retarded Casimir energy and force between a sphere and a plane."""

__all__ = [
    "SpherePlate",
    "SweepResult",
    "ConvergenceResult",
    "Geometry",
    "SubstrateContrast",
    "DrudeSphere",
    "ForceMethod",
    "SolverConfig",
    "CouplingBlock",
    "build_block",
    "ModeSpectrum",
    "EnergyResult",
    "ForceResult",
    "solve_spectrum",
    "zero_point_energy",
    "casimir_force",
    "energy_and_force",
    "converge",
    "local_exponent",
    "green_function_element",
    "ComparisonCurve",
    "dipole_modes",
    "dipole_energy_force",
    "quadrupole_energy_force",
    "proximity_force",
    "OracleReport",
    "RunConfig",
    "build_run_config",
    "LogCapture",
    "PersistentHandler",
    "setup_logging",
    "SpherePlateError",
    "ConfigError",
    "ConvergenceError",
    "NumericalError",
    "VERSION",
]

from .capture import LogCapture as LogCapture
from .capture import PersistentHandler as PersistentHandler
from .capture import setup_logging as setup_logging
from .coupling import CouplingBlock as CouplingBlock
from .coupling import build_block as build_block
from .helpers import VERSION as VERSION
from .helpers import ConfigError as ConfigError
from .helpers import ConvergenceError as ConvergenceError
from .helpers import NumericalError as NumericalError
from .helpers import SpherePlateError as SpherePlateError
from .model import DrudeSphere as DrudeSphere
from .model import ForceMethod as ForceMethod
from .model import Geometry as Geometry
from .model import SolverConfig as SolverConfig
from .model import SubstrateContrast as SubstrateContrast
from .options import RunConfig as RunConfig
from .options import build_run_config as build_run_config
from .oracle import OracleReport as OracleReport
from .reference import ComparisonCurve as ComparisonCurve
from .reference import dipole_energy_force as dipole_energy_force
from .reference import dipole_modes as dipole_modes
from .reference import proximity_force as proximity_force
from .reference import quadrupole_energy_force as quadrupole_energy_force
from .spectral import EnergyResult as EnergyResult
from .spectral import ForceResult as ForceResult
from .spectral import ModeSpectrum as ModeSpectrum
from .spectral import casimir_force as casimir_force
from .spectral import converge as converge
from .spectral import energy_and_force as energy_and_force
from .spectral import green_function_element as green_function_element
from .spectral import local_exponent as local_exponent
from .spectral import solve_spectrum as solve_spectrum
from .spectral import zero_point_energy as zero_point_energy
from .sphereplate import ConvergenceResult as ConvergenceResult
from .sphereplate import SpherePlate as SpherePlate
from .sphereplate import SweepResult as SweepResult
