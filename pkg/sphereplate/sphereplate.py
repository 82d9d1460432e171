"""Run sphere-plane sweeps, convergence studies and diagnostics."""

import logging
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from io import StringIO
from pathlib import Path
from typing import Optional

from dotenv import dotenv_values, load_dotenv

from .capture import LogCapture
from .coupling import build_block
from .helpers import (
    EXIT_CONVERGENCE,
    EXIT_NUMERICAL,
    EXIT_OK,
    ConfigError,
    ConvergenceError,
    Options,
    set_environ_defaults,
)
from .model import DrudeSphere, Geometry
from .options import RunConfig, build_run_config, environment_settings, merge_settings
from .oracle import OracleReport, run_oracle_suite
from .output import (
    ConvergenceRow,
    SweepRow,
    write_block_csv,
    write_convergence_csv,
    write_figure,
    write_modes_csv,
    write_sweep_csv,
)
from .reference import (
    ComparisonCurve,
    CurveLabel,
    PlateEnergyModel,
    casimir_polder_energy,
    casimir_polder_force,
    dipole_energy_force,
    proximity_force,
    quadrupole_energy_force,
)
from .spectral import converge, energy_and_force, local_exponent, mode_table, solve_spectrum

__all__ = ["SpherePlate", "SweepResult", "ConvergenceResult"]

CURVE_ORDER = ("full", "dipole", "quadrupole", "casimir_polder", "proximity")
ANALYTIC_L_MAX = {"dipole": 1, "quadrupole": 2, "casimir_polder": 1}


@dataclass
class SweepResult:
    """Outcome of :meth:`SpherePlate.run_sweep`."""

    status: int
    curves: dict[str, list[SweepRow]]
    files: list[Path] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)


@dataclass
class ConvergenceResult:
    """Outcome of :meth:`SpherePlate.run_convergence_report`."""

    status: int
    rows: list[ConvergenceRow]
    files: list[Path] = field(default_factory=list)


class SpherePlate:
    """Batch front end of the sphere-plane solver."""

    def __init__(
        self,
        config: Optional[RunConfig] = None,
        settings: Optional[dict] = None,
        environ: Optional[dict] = None,
    ):
        """Resolve the run configuration.

        Without an explicit ``config`` the settings are merged over the
        ``SPHEREPLATE_*`` environment variables and validated.

        :param config: ready-made configuration, defaults to None
        :type config: Optional[RunConfig], optional
        :param settings: values keyed by section then field, defaults to None
        :type settings: Optional[dict], optional
        :param environ: environment variables to set first, defaults to None
        :type environ: Optional[dict], optional
        """
        self._logger = logging.getLogger(__name__)
        self._previous_dotenv = []
        set_environ_defaults()
        if environ is not None:
            self.set_environ(**environ)
        if config is None:
            config = build_run_config(merge_settings(environment_settings(), settings))
        self.config = config

    def set_environ(
        self,
        filename: str = None,
        dictionary: dict = None,
        **kwargs: Options,
    ) -> None:
        """Load environment variables from a file, a dict or keyword arguments.

        :param filename: path to environment file, defaults to None
        :type filename: str, optional
        :param dictionary: dictionary of environment variables to load, defaults to None
        :type dictionary: dict, optional
        :param **kwargs: Environment variables and their values as named args
        :type **kwargs: Options
        """
        if filename:
            self._logger.debug("Loading environment variables from %s", filename)
            variables = dotenv_values(filename)
        else:
            variables = dictionary or kwargs
        self._previous_dotenv = list(variables.keys())

        with StringIO() as config:
            for key, value in variables.items():
                config.write(f"{key}={value}\n")
            config.seek(0)
            load_dotenv(stream=config, override=True)

    def unset_environ(self, *variable: Optional[str]) -> None:
        """Remove variables from the environment, by default the ones last set.

        :param *variable: variable names to remove
        :type *variable: Optional[str]
        """
        variables = [k for k in variable if k in os.environ] or [
            k for k in self._previous_dotenv if k in os.environ
        ]
        for var in variables:
            del os.environ[var]

    def _output_dir(self) -> Path:
        path = self.config.output_dir
        path.mkdir(parents=True, exist_ok=True)
        return path

    def _point_rows(self, name: str, grid) -> list[SweepRow]:
        cfg = self.config
        contrast = cfg.contrast
        if name == "full":
            with ThreadPoolExecutor(max_workers=cfg.threads) as pool:
                points = list(
                    pool.map(
                        lambda z: energy_and_force(Geometry(z), contrast, cfg.solver, strict=False),
                        grid,
                    )
                )
            return [
                SweepRow(
                    p.gap_over_radius,
                    p.energy.energy_reduced,
                    p.force.force_reduced,
                    None,
                    p.l_max_used,
                    p.converged,
                )
                for p in points
            ]

        rows = []
        for z in grid:
            geom = Geometry(float(z))
            if name == "dipole":
                energy, force = dipole_energy_force(geom, contrast)
            elif name == "quadrupole":
                energy, force = quadrupole_energy_force(geom, contrast, cfg.solver.force_method)
            elif name == "casimir_polder":
                energy = casimir_polder_energy(geom, contrast)
                force = casimir_polder_force(geom, contrast)
            else:
                energy = None
                force = proximity_force(geom, cfg.pt_model, cfg.pt_coefficient)
            rows.append(SweepRow(float(z), energy, force, None, ANALYTIC_L_MAX.get(name), True))
        return rows

    @staticmethod
    def _with_beta(rows: list[SweepRow]) -> list[SweepRow]:
        betas = dict(local_exponent([(row.z_over_a, row.force_reduced) for row in rows]))
        return [replace(row, beta=betas.get(row.z_over_a)) for row in rows]

    def _curve_label(self, name: str) -> CurveLabel:
        if name != "proximity":
            return CurveLabel(name)
        if self.config.pt_model is PlateEnergyModel.VDW_NONRETARDED:
            return CurveLabel.PROXIMITY_VDW
        return CurveLabel.PROXIMITY_IDEAL

    def run_sweep(self) -> SweepResult:
        """Evaluate every requested curve over the separation grid and write the files.

        One CSV per curve and one SVG per requested quantity. Points of the
        full curve that miss the tolerance are kept with ``converged=false``
        and turn the status into the convergence exit code.

        :return: status, rows per curve, files written and warnings logged
        :rtype: SweepResult
        """
        cfg = self.config
        grid = [float(z) for z in cfg.sweep.values()]
        curves = [name for name in CURVE_ORDER if name in cfg.curves]
        with_beta = "beta" in cfg.outputs
        result = SweepResult(status=EXIT_OK, curves={})

        with LogCapture() as capture:
            if with_beta and len(grid) < 3:
                self._logger.warning(
                    "beta needs at least 3 sweep points, got %d; dropping the column", len(grid)
                )
                with_beta = False
            for name in curves:
                self._logger.info("evaluating %s curve over %d points", name, len(grid))
                rows = self._point_rows(name, grid)
                if with_beta:
                    rows = self._with_beta(rows)
                result.curves[name] = rows
            if "modes" in cfg.outputs:
                result.files.append(self._write_sweep_modes(grid))
            if cfg.dump_block is not None:
                result.files.append(self.dump_block(cfg.sweep.z_min, cfg.dump_block))
        result.warnings = sorted(capture.records)

        full = result.curves.get("full", [])
        if cfg.solver.adaptive_truncation and any(not row.converged for row in full):
            result.status = EXIT_CONVERGENCE

        out = self._output_dir()
        comments = [*cfg.echo, f"warnings: {len(result.warnings)}", *result.warnings]
        if "csv" in cfg.formats:
            for name, rows in result.curves.items():
                header = [f"curve: {name}", *comments]
                result.files.append(write_sweep_csv(out / f"{name}.csv", rows, with_beta, header))
        if "svg" in cfg.formats:
            quantities = [q for q in ("energy", "force") if q in cfg.outputs]
            if with_beta:
                quantities.append("beta")
            for quantity in quantities:
                plotted = self._figure_curves(result.curves, quantity)
                if plotted:
                    result.files.append(write_figure(out / f"{quantity}.svg", plotted, quantity))
        return result

    def _figure_curves(self, curves: dict, quantity: str) -> list[ComparisonCurve]:
        plotted = []
        for name, rows in curves.items():
            if quantity == "energy":
                points = [
                    (r.z_over_a, r.energy_reduced) for r in rows if r.energy_reduced is not None
                ]
            elif quantity == "force":
                points = [(r.z_over_a, r.force_reduced) for r in rows]
            else:
                points = [(r.z_over_a, r.beta) for r in rows if r.beta is not None]
            if points:
                label = self._curve_label(name)
                plotted.append(ComparisonCurve(label, quantity, tuple(points)))
        return plotted

    def _write_sweep_modes(self, grid) -> Path:
        rows = []
        sphere = DrudeSphere()
        for z in grid:
            spectrum = solve_spectrum(Geometry(z), self.config.contrast, self.config.solver)
            rows.extend({"z_over_a": z, **row} for row in mode_table(spectrum, sphere))
        return write_modes_csv(self._output_dir() / "modes.csv", rows, self.config.echo)

    def run_convergence_report(self, gap_over_radius: float) -> ConvergenceResult:
        """Double ``l_max`` at one separation and time every rung.

        :param gap_over_radius: z/a to study
        :type gap_over_radius: float
        :return: status, one row per rung and the CSV written
        :rtype: ConvergenceResult
        """
        solver = replace(self.config.solver, adaptive_truncation=True)
        geom = Geometry(gap_over_radius)
        rows: list[ConvergenceRow] = []
        start = time.perf_counter()

        def record(l_max, energy, m_max):
            value = energy.energy_reduced
            change = None
            if rows and value != 0.0:
                change = abs(value - rows[-1].energy_reduced) / abs(value)
            rows.append(ConvergenceRow(l_max, value, change, m_max, time.perf_counter() - start))

        status = EXIT_OK
        try:
            converge(
                geom, self.config.contrast, solver, threads=self.config.threads, on_rung=record
            )
        except ConvergenceError as e:
            self._logger.warning("%s", e)
            status = EXIT_CONVERGENCE
        files = []
        if "csv" in self.config.formats:
            path = self._output_dir() / f"convergence_z{gap_over_radius!r}.csv"
            files.append(write_convergence_csv(path, rows, self.config.echo))
        return ConvergenceResult(status, rows, files)

    def modes(self, gap_over_radius: float, sphere: Optional[DrudeSphere] = None) -> list[dict]:
        """Write the mode table of one separation to ``modes_z<z>.csv``."""
        spectrum = solve_spectrum(
            Geometry(gap_over_radius),
            self.config.contrast,
            self.config.solver,
            threads=self.config.threads,
        )
        rows = mode_table(spectrum, sphere or DrudeSphere())
        path = self._output_dir() / f"modes_z{gap_over_radius!r}.csv"
        write_modes_csv(path, rows, self.config.echo)
        return rows

    def oracle(self, draws: int = 20, power_draws: int = 50) -> tuple[int, list[OracleReport]]:
        """Run the oracle suite; the status is nonzero if any case failed."""
        reports = run_oracle_suite(draws=draws, power_draws=power_draws)
        status = EXIT_OK if all(report.passed for report in reports) else EXIT_NUMERICAL
        return status, reports

    def dump_block(self, gap_over_radius: float, m: int) -> Path:
        """Write the H block of order ``m`` at one separation."""
        if m > self.config.solver.l_max:
            raise ConfigError(f"m={m} exceeds l_max={self.config.solver.l_max}")
        block = build_block(
            Geometry(gap_over_radius), self.config.contrast, m, self.config.solver.l_max
        )
        return write_block_csv(self._output_dir() / f"block_m{m}.csv", block, self.config.echo)
