"""CSV and SVG writers for batch runs.

Floats are written with ``repr`` (shortest round-trip form) and figures with a
fixed SVG hash salt and no date, so identical runs produce identical bytes.
"""

import csv
import logging
import numbers
import os
from dataclasses import astuple, dataclass, fields
from pathlib import Path
from typing import Iterable, Optional, Sequence, Union

import matplotlib
import numpy as np

matplotlib.use("Agg")

from matplotlib import rc_context  # noqa: E402
from matplotlib.figure import Figure  # noqa: E402

from .coupling import CouplingBlock  # noqa: E402
from .helpers import VERSION, ConfigError  # noqa: E402
from .reference import ComparisonCurve  # noqa: E402

__all__ = [
    "SweepRow",
    "ConvergenceRow",
    "format_value",
    "parse_value",
    "write_csv",
    "read_csv",
    "write_sweep_csv",
    "write_convergence_csv",
    "write_modes_csv",
    "write_block_csv",
    "write_figure",
]

logger = logging.getLogger(__name__)

SVG_HASH_SALT = "sphereplate"
AXIS_LABELS = {
    "energy": "|E| / (hbar w_p)",
    "force": "|F| a / (hbar w_p)",
    "beta": "beta = -d ln|F| / d ln(z/a)",
}

Cell = Union[None, bool, int, float, str]


@dataclass(frozen=True)
class SweepRow:
    """One point of a sweep curve; ``beta`` is None at the endpoints."""

    z_over_a: float
    energy_reduced: Optional[float]
    force_reduced: float
    beta: Optional[float]
    l_max_used: Optional[int]
    converged: bool

    @classmethod
    def header(cls, with_beta: bool = True) -> list[str]:
        """CSV column names."""
        return [f.name for f in fields(cls) if with_beta or f.name != "beta"]

    def cells(self, with_beta: bool = True) -> list[Cell]:
        """Values in header order."""
        values = list(astuple(self))
        if not with_beta:
            del values[3]
        return values


@dataclass(frozen=True)
class ConvergenceRow:
    """One rung of a convergence ladder."""

    l_max: int
    energy_reduced: float
    rel_change: Optional[float]
    m_max_used: int
    wall_time: float

    @classmethod
    def header(cls) -> list[str]:
        """CSV column names."""
        return [f.name for f in fields(cls)]


def format_value(value: Cell) -> str:
    """Shortest text that reads back to the same value."""
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, numbers.Integral):
        return str(int(value))
    if isinstance(value, numbers.Real):
        return repr(float(value))
    return str(value)


def parse_value(text: str) -> Cell:
    """Inverse of :func:`format_value`."""
    if text == "":
        return None
    if text in ("true", "false"):
        return text == "true"
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        return text


def write_csv(
    path: Union[str, os.PathLike],
    header: Sequence[str],
    rows: Iterable[Sequence[Cell]],
    comments: Sequence[str] = (),
) -> Path:
    """Write ``#`` comment lines, a header and rows.

    :param path: destination file
    :type path: Union[str, os.PathLike]
    :param header: column names
    :type header: Sequence[str]
    :param rows: one sequence of cells per line
    :type rows: Iterable[Sequence[Cell]]
    :param comments: lines written first with a ``# `` prefix, defaults to ()
    :type comments: Sequence[str], optional
    :return: the path written
    :rtype: Path
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as handle:
        for comment in comments:
            handle.write(f"# {comment}\n")
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            if len(row) != len(header):
                raise ConfigError(f"row has {len(row)} cells, header has {len(header)}")
            writer.writerow([format_value(cell) for cell in row])
    logger.debug("wrote %s", path)
    return path


def read_csv(path: Union[str, os.PathLike]) -> tuple[list[str], list[str], list[list[Cell]]]:
    """Read a file written by :func:`write_csv`.

    :return: comments without their prefix, the header and the parsed rows
    :rtype: tuple[list[str], list[str], list[list[Cell]]]
    """
    comments = []
    body = []
    with open(path, newline="", encoding="utf-8") as handle:
        for line in handle:
            if line.startswith("#"):
                comments.append(line[2:].rstrip("\n") if line.startswith("# ") else line[1:])
            else:
                body.append(line)
    reader = csv.reader(body)
    header = next(reader, [])
    rows = [[parse_value(cell) for cell in row] for row in reader]
    return comments, header, rows


def _comments(extra: Sequence[str]) -> list[str]:
    return [f"sphereplate {VERSION}", *extra]


def write_sweep_csv(
    path: Union[str, os.PathLike],
    rows: Sequence[SweepRow],
    with_beta: bool = True,
    comments: Sequence[str] = (),
) -> Path:
    """Write one sweep curve."""
    return write_csv(
        path,
        SweepRow.header(with_beta),
        (row.cells(with_beta) for row in rows),
        _comments(comments),
    )


def write_convergence_csv(
    path: Union[str, os.PathLike], rows: Sequence[ConvergenceRow], comments: Sequence[str] = ()
) -> Path:
    """Write a convergence ladder."""
    return write_csv(path, ConvergenceRow.header(), (astuple(r) for r in rows), _comments(comments))


def write_modes_csv(
    path: Union[str, os.PathLike], modes: Sequence[dict], comments: Sequence[str] = ()
) -> Path:
    """Write rows produced by :func:`sphereplate.spectral.mode_table`."""
    if not modes:
        raise ConfigError("no modes to write")
    header = list(modes[0])
    return write_csv(
        path, header, ([mode[key] for key in header] for mode in modes), _comments(comments)
    )


def write_block_csv(
    path: Union[str, os.PathLike], block: CouplingBlock, comments: Sequence[str] = ()
) -> Path:
    """Dump every ``(l, l', value)`` entry of one H block."""
    extra = [f"m={block.m} x={block.x!r}", *comments]
    return write_csv(path, ["l", "l_prime", "value"], block.rows(), _comments(extra))


def write_figure(
    path: Union[str, os.PathLike],
    curves: Sequence[ComparisonCurve],
    quantity: str,
    title: Optional[str] = None,
) -> Path:
    """Log-log line chart of ``|value|`` against z/a, one line per curve.

    ``beta`` curves are drawn on a log x axis only.

    :param path: destination ``.svg`` file
    :type path: Union[str, os.PathLike]
    :param curves: curves to overlay, in legend order
    :type curves: Sequence[ComparisonCurve]
    :param quantity: ``energy``, ``force`` or ``beta``
    :type quantity: str
    :param title: figure title, defaults to None
    :type title: Optional[str], optional
    :return: the path written
    :rtype: Path
    """
    if quantity not in AXIS_LABELS:
        raise ConfigError(f"cannot plot `{quantity}`")
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with rc_context({"svg.hashsalt": SVG_HASH_SALT}):
        figure = Figure(figsize=(6.4, 4.8))
        axes = figure.add_subplot()
        for curve in curves:
            values = curve.values if quantity == "beta" else abs(curve.values)
            axes.plot(curve.separations, values, label=curve.label.value)
        axes.set_xscale("log")
        if quantity != "beta":
            axes.set_yscale("log")
        axes.set_xlabel("z / a")
        axes.set_ylabel(AXIS_LABELS[quantity])
        if title:
            axes.set_title(title)
        axes.legend()
        figure.savefig(path, format="svg", metadata={"Date": None})
    logger.debug("wrote %s", path)
    return path
