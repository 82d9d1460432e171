"""Option Dataclasses and run configuration."""

import logging
import math
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Mapping, Optional, Set, Union

import numpy as np
from dotenv import dotenv_values

from .capture import LOG_LVL
from .helpers import ConfigError, Options
from .model import ForceMethod, SolverConfig, SubstrateContrast
from .reference import CurveLabel, PlateEnergyModel

logger = logging.getLogger(__name__)

__all__ = [
    "CommonOptions",
    "SweepOptions",
    "MaterialOptions",
    "SolverOptions",
    "OutputOptions",
    "SECTIONS",
    "SweepGrid",
    "RunConfig",
    "load_config_file",
    "environment_settings",
    "merge_settings",
    "build_run_config",
]

ENV_PREFIX = "SPHEREPLATE_"
ENV_ALIASES = {
    "SPHEREPLATE_LOG_LEVEL": ("common", "log_level"),
    "SPHEREPLATE_THREADS": ("solver", "threads"),
}

OUTPUT_KINDS = ("energy", "force", "beta", "modes")
FORMAT_KINDS = ("csv", "svg")
SPACING_KINDS = ("log", "linear")
LOG_LEVELS = ("critical", "error", "warning", "info", "debug")
# run-environment fields kept out of the CSV config echo
ECHO_EXCLUDED = frozenset({"threads", "out", "log_level", "log_json"})
TRUE_STRINGS = {"1", "true", "yes", "on"}
FALSE_STRINGS = {"0", "false", "no", "off", ""}


@dataclass
class OptionsBase:
    """Holds all the shared methods for the subclasses.

    Every subclass should use this __init__ method because it will only set the values that the
    dataclass supports and ignore the ones not part of it. This way one merged settings dict can
    be passed to every constructor without sorting the keys by section first.
    """

    def __init__(self, **kwargs):
        """Set options to be used for the subclasses."""
        default = self._defaults()
        for option in kwargs:
            if option in default:
                setattr(self, option, self._coerce(option, kwargs[option]))

    @staticmethod
    def convert_name(value: str) -> str:
        """Add flag marker and replace underscores with dashes in name."""
        return "--" + value.replace("_", "-")

    @classmethod
    def _defaults(cls) -> Set[str]:
        defaults = set()
        for field_ in cls.__dataclass_fields__.values():
            defaults.add(field_.name)
        return defaults

    @staticmethod
    def _is_list(type_):
        try:
            return issubclass(type_, list)
        except TypeError:
            return issubclass(type_.__origin__, list)

    @classmethod
    def _coerce(cls, name: str, value):
        """Turn text from a config file or the environment into the field's type."""
        if not isinstance(value, str):
            return value
        type_ = cls.__dataclass_fields__[name].type
        text = value.strip()
        try:
            if type_ is bool:
                if text.lower() in TRUE_STRINGS:
                    return True
                if text.lower() in FALSE_STRINGS:
                    return False
                raise ValueError(text)
            if cls._is_list(type_):
                return [item.strip() for item in text.split(",") if item.strip()]
            if text.lower() in ("", "none"):
                return None
            if type_ is int:
                return int(text)
            if type_ is float:
                return float(text)
        except ValueError as e:
            raise ConfigError(f"Invalid value for `{name}`: {value!r}") from e
        return text

    def parse(
        self, all_fields: bool = False, exclude: Set[str] = frozenset()
    ) -> List[Optional[Union[str, int, float]]]:
        """Turn options into a list of command line flags.

        :param all_fields: include fields still at their default, defaults to False
        :type all_fields: bool, optional
        :param exclude: field names to leave out, defaults to frozenset()
        :type exclude: Set[str], optional
        :return: options for the command line
        :rtype: List[Optional[Union[str, int, float]]]
        """
        args = []

        for key, value in self.__dataclass_fields__.items():
            attr = getattr(self, key)
            default = value.default
            if key in exclude or attr is None or (not all_fields and default == attr):
                continue
            flag = self.convert_name(key)
            if value.type is bool:
                if attr:
                    args.append(flag)
            elif value.type in (str, int, float):
                args.extend([flag, attr])
            elif self._is_list(value.type):
                args.extend([flag, ",".join(attr)])
            else:
                raise TypeError(f'Unrecognized flag type for "{key}": {value.type}')
        return args


@dataclass
class CommonOptions(OptionsBase):
    """Logging options shared by every subcommand.

    :param log_level: lowest level to emit, one of critical, error, warning, info, debug
    :type log_level: str
    :param log_json: output one JSON object per log line instead of formatted text
    :type log_json: bool
    """

    log_level: str = LOG_LVL
    log_json: bool = False

    def __init__(self, **kwargs):
        """Set the logging options."""
        super().__init__(**kwargs)


@dataclass
class SweepOptions(OptionsBase):
    """Separation grid.

    :param z_min: smallest z/a
    :type z_min: float
    :param z_max: largest z/a
    :type z_max: float
    :param points: number of grid points
    :type points: int
    :param spacing: `log` or `linear`
    :type spacing: str
    """

    z_min: float = 0.1
    z_max: float = 100.0
    points: int = 50
    spacing: str = "log"

    def __init__(self, **kwargs):
        """Set the sweep options."""
        super().__init__(**kwargs)


@dataclass
class MaterialOptions(OptionsBase):
    """Substrate, either a contrast factor or a named preset (not both).

    :param fc: contrast factor f_c in [-1, 1)
    :type fc: float
    :param substrate: named preset, `perfect_conductor` or `sapphire`
    :type substrate: str
    """

    fc: float = None
    substrate: str = None

    def __init__(self, **kwargs):
        """Set the material options."""
        super().__init__(**kwargs)


@dataclass
class SolverOptions(OptionsBase):
    """Truncation, tolerance and force settings.

    :param lmax: highest multipole order (the cap with adaptive truncation)
    :type lmax: int
    :param mmax: highest azimuthal order, defaults to lmax
    :type mmax: int
    :param tol: relative energy tolerance
    :type tol: float
    :param adaptive: double lmax until the energy settles
    :type adaptive: bool
    :param force_method: `hf`, `fd` or `both`
    :type force_method: str
    :param fd_step: relative finite-difference step in z/a
    :type fd_step: float
    :param threads: worker threads
    :type threads: int
    """

    lmax: int = 32
    mmax: int = None
    tol: float = 1e-6
    adaptive: bool = False
    force_method: str = "hf"
    fd_step: float = 1e-4
    threads: int = 1

    def __init__(self, **kwargs):
        """Set the solver options."""
        super().__init__(**kwargs)


@dataclass
class OutputOptions(OptionsBase):
    """What to compute and where to write it.

    :param outputs: any of energy, force, beta, modes
    :type outputs: List[str]
    :param curves: any of full, dipole, quadrupole, proximity, casimir_polder
    :type curves: List[str]
    :param out: output directory
    :type out: str
    :param formats: any of csv, svg
    :type formats: List[str]
    :param pt_model: plate energy law of the proximity curve, `vdw_nonretarded` or `ideal_retarded`
    :type pt_model: str
    :param pt_coefficient: positive prefactor of the proximity curve
    :type pt_coefficient: float
    :param dump_block: also write the H block of this m at z_min
    :type dump_block: int
    """

    outputs: List[str] = None
    curves: List[str] = None
    out: str = "."
    formats: List[str] = None
    pt_model: str = "vdw_nonretarded"
    pt_coefficient: float = 1.0
    dump_block: int = None

    def __init__(self, **kwargs):
        """Set the output options."""
        super().__init__(**kwargs)


SECTIONS = {
    "common": CommonOptions,
    "sweep": SweepOptions,
    "material": MaterialOptions,
    "solver": SolverOptions,
    "output": OutputOptions,
}


@dataclass(frozen=True)
class SweepGrid:
    """Separations of a sweep.

    :param z_min: smallest z/a, positive
    :type z_min: float
    :param z_max: largest z/a, above z_min
    :type z_max: float
    :param points: at least 2
    :type points: int
    :param spacing: `log` or `linear`
    :type spacing: str
    """

    z_min: float
    z_max: float
    points: int
    spacing: str = "log"

    def __post_init__(self):
        """Check the grid invariants."""
        if not (math.isfinite(self.z_min) and self.z_min > 0):
            raise ConfigError(f"z_min must be positive, got {self.z_min!r}")
        if not (math.isfinite(self.z_max) and self.z_max > self.z_min):
            raise ConfigError(f"z_max must exceed z_min, got {self.z_max!r}")
        if self.points < 2:
            raise ConfigError(f"a sweep needs at least 2 points, got {self.points!r}")
        if self.spacing not in SPACING_KINDS:
            raise ConfigError(f"spacing must be log or linear, got `{self.spacing}`")

    def values(self) -> np.ndarray:
        """The z/a grid, strictly increasing."""
        if self.spacing == "log":
            return np.geomspace(self.z_min, self.z_max, self.points)
        return np.linspace(self.z_min, self.z_max, self.points)


@dataclass(frozen=True)
class RunConfig:
    """Validated, immutable configuration of one batch run."""

    sweep: SweepGrid
    contrast: SubstrateContrast
    solver: SolverConfig
    outputs: frozenset
    curves: frozenset
    output_dir: Path
    formats: frozenset
    threads: int = 1
    pt_model: PlateEnergyModel = PlateEnergyModel.VDW_NONRETARDED
    pt_coefficient: float = 1.0
    dump_block: Optional[int] = None
    log_level: str = LOG_LVL
    log_json: bool = False
    substrate: Optional[str] = None
    echo: tuple[str, ...] = field(default=(), compare=False)


def _section_of(key: str) -> Optional[tuple[str, str]]:
    for section, options in SECTIONS.items():
        prefix = section.upper() + "_"
        if key.upper().startswith(prefix):
            name = key[len(prefix) :].lower()
            if name in options._defaults():
                return section, name
    return None


def load_config_file(path: Union[str, os.PathLike]) -> dict:
    """Read a flat ``SECTION_FIELD=value`` file.

    :param path: config file
    :type path: Union[str, os.PathLike]
    :raises ConfigError: if the file is missing or holds an unknown key
    :return: raw values keyed by section then field
    :rtype: dict
    """
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file `{path}` does not exist")
    logger.debug("Loading config from %s", path)
    settings: dict = {}
    for key, value in dotenv_values(path).items():
        target = _section_of(key)
        if target is None:
            raise ConfigError(f"Unknown config key `{key}` in {path}")
        section, name = target
        settings.setdefault(section, {})[name] = "" if value is None else value
    return settings


def environment_settings(environ: Optional[Mapping[str, str]] = None) -> dict:
    """Settings from ``SPHEREPLATE_SECTION_FIELD`` variables; unknown names are skipped."""
    environ = os.environ if environ is None else environ
    settings: dict = {}
    for key, value in environ.items():
        if key in ENV_ALIASES:
            target = ENV_ALIASES[key]
        elif key.startswith(ENV_PREFIX):
            target = _section_of(key[len(ENV_PREFIX) :])
        else:
            continue
        if target is not None:
            settings.setdefault(target[0], {})[target[1]] = value
    return settings


def merge_settings(*layers: Optional[Mapping[str, Mapping[str, Options]]]) -> dict:
    """Merge settings, later layers win; ``None`` values in a layer are skipped."""
    merged: dict = {}
    for layer in layers:
        for section, values in (layer or {}).items():
            for name, value in values.items():
                if value is not None:
                    merged.setdefault(section, {})[name] = value
    return merged


def _choices(values: Optional[List[str]], allowed, default, what: str) -> frozenset:
    chosen = [v.strip().lower() for v in (values if values is not None else default)]
    unknown = sorted(set(chosen) - set(allowed))
    if unknown:
        raise ConfigError(f"Unknown {what}: {', '.join(unknown)}")
    return frozenset(chosen)


def _contrast(material: MaterialOptions) -> SubstrateContrast:
    if material.fc is not None and material.substrate is not None:
        raise ConfigError("give either a contrast factor or a substrate preset, not both")
    if material.fc is not None:
        return SubstrateContrast(material.fc)
    return SubstrateContrast.preset(material.substrate or "perfect_conductor")


def build_run_config(mapping: Optional[Mapping[str, Mapping[str, Options]]] = None) -> RunConfig:
    """Validate merged settings into a :class:`RunConfig`.

    :param mapping: values keyed by section then field, raw strings allowed
    :type mapping: Optional[Mapping[str, Mapping[str, Options]]]
    :raises ConfigError: on any invalid value
    :return: the run configuration
    :rtype: RunConfig
    """
    mapping = mapping or {}
    unknown = sorted(set(mapping) - set(SECTIONS))
    if unknown:
        raise ConfigError(f"Unknown config section(s): {', '.join(unknown)}")
    sections = {name: cls(**mapping.get(name, {})) for name, cls in SECTIONS.items()}
    common, sweep, material = sections["common"], sections["sweep"], sections["material"]
    solver, output = sections["solver"], sections["output"]

    if common.log_level.lower() not in LOG_LEVELS:
        raise ConfigError(f"Unknown log level `{common.log_level}`")
    if solver.threads is None or solver.threads < 1:
        raise ConfigError(f"threads must be >= 1, got {solver.threads!r}")
    if output.dump_block is not None and output.dump_block < 0:
        raise ConfigError(f"dump_block must be a nonnegative m, got {output.dump_block!r}")
    curve_names = [label.value for label in CurveLabel if not label.value.startswith("proximity")]
    curves = _choices(
        output.curves, curve_names + ["proximity"], ["full", "dipole"], "curve(s)"
    )

    solver_config = SolverConfig(
        l_max=solver.lmax,
        m_max=solver.mmax,
        energy_rel_tol=solver.tol,
        adaptive_truncation=solver.adaptive,
        force_method=ForceMethod.parse(solver.force_method),
        fd_step_rel=solver.fd_step,
    )
    echo = tuple(
        f"{name}: " + " ".join(str(arg) for arg in flags)
        for name, flags in (
            (name, options.parse(all_fields=True, exclude=ECHO_EXCLUDED))
            for name, options in sections.items()
        )
        if flags
    )
    return RunConfig(
        sweep=SweepGrid(sweep.z_min, sweep.z_max, sweep.points, sweep.spacing),
        contrast=_contrast(material),
        solver=solver_config,
        outputs=_choices(output.outputs, OUTPUT_KINDS, ["energy", "force", "beta"], "output(s)"),
        curves=curves,
        output_dir=Path(output.out),
        formats=_choices(output.formats, FORMAT_KINDS, ["csv", "svg"], "format(s)"),
        threads=solver.threads,
        pt_model=PlateEnergyModel.parse(output.pt_model),
        pt_coefficient=output.pt_coefficient,
        dump_block=output.dump_block,
        log_level=common.log_level.lower(),
        log_json=common.log_json,
        substrate=material.substrate,
        echo=echo,
    )
