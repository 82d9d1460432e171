"""Command line front door: ``sphereplate sweep|converge|modes|oracle``."""

import argparse
import logging
import sys
from typing import Optional, Sequence

from .capture import setup_logging
from .helpers import EXIT_OK, VERSION, SpherePlateError, exit_code, set_environ_defaults
from .model import DrudeSphere
from .options import build_run_config, environment_settings, load_config_file, merge_settings
from .sphereplate import SpherePlate

__all__ = ["build_parser", "flag_settings", "main"]

logger = logging.getLogger(__name__)

# dest -> (section, field)
FLAG_FIELDS = {
    "z_min": ("sweep", "z_min"),
    "z_max": ("sweep", "z_max"),
    "points": ("sweep", "points"),
    "spacing": ("sweep", "spacing"),
    "fc": ("material", "fc"),
    "substrate": ("material", "substrate"),
    "lmax": ("solver", "lmax"),
    "mmax": ("solver", "mmax"),
    "tol": ("solver", "tol"),
    "adaptive": ("solver", "adaptive"),
    "force_method": ("solver", "force_method"),
    "fd_step": ("solver", "fd_step"),
    "threads": ("solver", "threads"),
    "outputs": ("output", "outputs"),
    "curves": ("output", "curves"),
    "out": ("output", "out"),
    "formats": ("output", "formats"),
    "pt_model": ("output", "pt_model"),
    "pt_coefficient": ("output", "pt_coefficient"),
    "dump_block": ("output", "dump_block"),
    "log_level": ("common", "log_level"),
    "log_json": ("common", "log_json"),
}


def _common_flags() -> argparse.ArgumentParser:
    parent = argparse.ArgumentParser(add_help=False)
    parent.add_argument("--config", metavar="PATH", help="flat SECTION_FIELD=value config file")

    sweep = parent.add_argument_group("sweep")
    sweep.add_argument("--z-min", type=float, help="smallest z/a")
    sweep.add_argument("--z-max", type=float, help="largest z/a")
    sweep.add_argument("--points", type=int, help="number of separations")
    sweep.add_argument("--spacing", choices=("log", "linear"))

    material = parent.add_argument_group("material").add_mutually_exclusive_group()
    material.add_argument("--fc", type=float, metavar="VALUE", help="contrast factor in [-1, 1)")
    material.add_argument("--substrate", metavar="NAME", help="perfect_conductor or sapphire")

    solver = parent.add_argument_group("solver")
    solver.add_argument("--lmax", type=int, metavar="N", help="multipole cap")
    solver.add_argument("--mmax", type=int, metavar="N", help="azimuthal cap, defaults to lmax")
    solver.add_argument("--tol", type=float, metavar="X", help="relative energy tolerance")
    solver.add_argument(
        "--adaptive",
        action=argparse.BooleanOptionalAction,
        default=None,
        help="double lmax until the energy settles",
    )
    solver.add_argument("--force-method", choices=("hf", "fd", "both"))
    solver.add_argument("--fd-step", type=float, metavar="X", help="relative FD step")
    solver.add_argument("--threads", type=int, metavar="N")

    output = parent.add_argument_group("output")
    output.add_argument("--outputs", metavar="LIST", help="energy,force,beta,modes")
    output.add_argument(
        "--curves", metavar="LIST", help="full,dipole,quadrupole,proximity,casimir_polder"
    )
    output.add_argument("--out", metavar="DIR", help="output directory")
    output.add_argument("--formats", metavar="LIST", help="csv,svg")
    output.add_argument("--pt-model", choices=("vdw_nonretarded", "ideal_retarded"))
    output.add_argument("--pt-coefficient", type=float, metavar="X")
    output.add_argument("--dump-block", type=int, metavar="M", help="also write block m at z-min")

    logs = parent.add_argument_group("logging")
    logs.add_argument("--log-level", choices=("critical", "error", "warning", "info", "debug"))
    logs.add_argument("--log-json", action="store_true", default=None)
    return parent


def build_parser() -> argparse.ArgumentParser:
    """Parser with the four subcommands sharing one set of flags."""
    parent = _common_flags()
    parser = argparse.ArgumentParser(
        prog="sphereplate",
        description="Non-retarded Casimir energy and force between a sphere and a plane.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {VERSION}")
    commands = parser.add_subparsers(dest="command", required=True)

    commands.add_parser("sweep", parents=[parent], help="energy and force over a z/a grid")
    converge = commands.add_parser("converge", parents=[parent], help="l_max doubling ladder")
    converge.add_argument("--at", type=float, required=True, metavar="Z", help="z/a to study")
    modes = commands.add_parser("modes", parents=[parent], help="mode table at one z/a")
    modes.add_argument("--at", type=float, required=True, metavar="Z", help="z/a to list")
    modes.add_argument("--damping", type=float, default=0.0, help="1/(tau w_p)")
    oracle = commands.add_parser("oracle", parents=[parent], help="run the oracle comparisons")
    oracle.add_argument("--draws", type=int, default=20, help="random exact-block comparisons")
    oracle.add_argument(
        "--power-draws", type=int, default=50, help="random l_max = 32 blocks for power iteration"
    )
    return parser


def flag_settings(args: argparse.Namespace) -> dict:
    """Settings given on the command line, keyed by section then field."""
    settings: dict = {}
    for dest, (section, name) in FLAG_FIELDS.items():
        value = getattr(args, dest, None)
        if value is not None:
            settings.setdefault(section, {})[name] = value
    return settings


def _resolve(args: argparse.Namespace):
    flags = flag_settings(args)
    layers = [environment_settings()]
    if args.config:
        layers.append(load_config_file(args.config))
    merged = merge_settings(*layers)
    # a substrate given on the command line replaces the other form from lower layers
    material = flags.get("material", {})
    if material:
        for name in ("fc", "substrate"):
            if name not in material:
                merged.get("material", {}).pop(name, None)
    return build_run_config(merge_settings(merged, flags))


def _run(args: argparse.Namespace) -> int:
    config = _resolve(args)
    setup_logging(config.log_level, config.log_json)
    api = SpherePlate(config)

    if args.command == "sweep":
        result = api.run_sweep()
        for path in result.files:
            print(path)
        if result.warnings:
            logger.info("%d warning(s) during the sweep", len(result.warnings))
        return result.status
    if args.command == "converge":
        result = api.run_convergence_report(args.at)
        for row in result.rows:
            print(f"l_max={row.l_max} E={row.energy_reduced!r} dE/E={row.rel_change!r}")
        return result.status
    if args.command == "modes":
        rows = api.modes(args.at, DrudeSphere(damping_ratio=args.damping))
        print(f"{len(rows)} modes written to {config.output_dir}")
        return EXIT_OK
    status, reports = api.oracle(draws=args.draws, power_draws=args.power_draws)
    for report in reports:
        print(report.to_json())
    return status


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Entry point of the ``sphereplate`` script.

    :param argv: arguments without the program name, defaults to ``sys.argv[1:]``
    :type argv: Optional[Sequence[str]], optional
    :return: 0 success, 2 config error, 3 convergence failure, 4 numerical error
    :rtype: int
    """
    set_environ_defaults()
    args = build_parser().parse_args(argv)
    try:
        return _run(args)
    except SpherePlateError as e:
        print(f"sphereplate: error: {e}", file=sys.stderr)
        return exit_code(e)
