"""Per-m blocks of the dimensionless multipolar matrix H.

For a fixed azimuthal order ``m`` the block is

    H[l, l'] = n_l0 delta(l, l') + f_c * sign(l, l') * C(l, l', m) * x**(l + l' + 1)

with x = a / (2(z + a)), sign = (-1)**(l + l') and

    C(l, l', m) = sqrt(l l' / ((2l+1)(2l'+1))) * (l+l')!
                  / sqrt((l+m)! (l-m)! (l'+m)! (l'-m)!)

C comes from the z-axis translation of the image multipole of order l' onto
the sphere centre, symmetrised by the similarity transform that turns the
polarisability-weighted coupling into a symmetric matrix. The l = l' = 1
entries reproduce the three dipolar modes (1/3)(1 + b f_c x^3) with b = 2 for
m = 0 and b = 1 for m = 1.

Coefficients are evaluated in log space so blocks with l up to several
thousand stay finite.
"""

import functools
import logging
import math
from dataclasses import dataclass
from typing import Iterator, Optional

import numpy as np
from scipy.special import gammaln

from .helpers import ConfigError
from .model import Geometry, SubstrateContrast

__all__ = [
    "CouplingBlock",
    "LogFactorialTable",
    "isolated_sphere_eigenvalue",
    "isolated_sphere_eigenvalues",
    "log_coupling_coefficient",
    "build_block",
    "block_derivative",
]

logger = logging.getLogger(__name__)


class LogFactorialTable:
    """Read-only table of ln(n!) for n = 0 .. size - 1."""

    def __init__(self, size: int):
        """Tabulate ln(n!) with ``scipy.special.gammaln``.

        :param size: number of entries
        :type size: int
        """
        values = gammaln(np.arange(size, dtype=float) + 1.0)
        values.setflags(write=False)
        self.values = values

    def __len__(self) -> int:
        """Number of tabulated factorials."""
        return len(self.values)

    def __getitem__(self, n):
        """ln(n!) for an integer or an integer array."""
        return self.values[n]

    @classmethod
    def for_order(cls, l_max: int) -> "LogFactorialTable":
        """Shared table large enough for blocks up to ``l_max`` (2 l_max + 2 entries)."""
        return _shared_table(_table_size(l_max))


def _table_size(l_max: int) -> int:
    # round up to a power of two so nearby truncations share one table
    return 1 << max(2 * l_max + 2, 16).bit_length()


@functools.lru_cache(maxsize=8)
def _shared_table(size: int) -> LogFactorialTable:
    logger.debug("building log-factorial table with %d entries", size)
    return LogFactorialTable(size)


def isolated_sphere_eigenvalue(l: int) -> float:  # noqa: E741
    """Depolarisation eigenvalue n_l0 = l/(2l + 1) of an isolated sphere."""
    if l < 1:
        raise ConfigError(f"multipole order must be >= 1, got {l!r}")
    return l / (2 * l + 1)


def isolated_sphere_eigenvalues(l_min: int, l_max: int) -> np.ndarray:
    """n_l0 for l = l_min .. l_max as an array."""
    if l_min < 1:
        raise ConfigError(f"multipole order must be >= 1, got {l_min!r}")
    ls = np.arange(l_min, l_max + 1, dtype=float)
    return ls / (2.0 * ls + 1.0)


def _half_log(ls, m: int, table: LogFactorialTable):
    """Row factor of the log coefficient: 0.5 [ln(l/(2l+1)) - ln (l+m)! - ln (l-m)!]."""
    ls = np.asarray(ls)
    return 0.5 * (np.log(ls / (2.0 * ls + 1.0)) - table[ls + m] - table[ls - m])


def _check_indices(l: int, l_prime: int, m: int) -> int:  # noqa: E741
    m = abs(m)
    l_min = max(1, m)
    if l < l_min or l_prime < l_min:
        raise ConfigError(f"need l, l' >= max(1, |m|); got l={l}, l'={l_prime}, m={m}")
    return m


def log_coupling_coefficient(
    l: int,  # noqa: E741
    l_prime: int,
    m: int,
    table: Optional[LogFactorialTable] = None,
) -> tuple[float, int]:
    """Geometry independent part of the (l, l') coupling in block ``m``.

    The matrix entry is ``f_c * sign * exp(log_magnitude + (l + l' + 1) * ln x)``.
    The pair is ordered before evaluation so swapping ``l`` and ``l'`` returns
    the same bits.

    :param l: row multipole order
    :type l: int
    :param l_prime: column multipole order
    :type l_prime: int
    :param m: azimuthal order, the sign of ``m`` is irrelevant
    :type m: int
    :param table: log-factorial table, defaults to the shared one
    :type table: Optional[LogFactorialTable], optional
    :return: natural log of the coefficient magnitude and its sign
    :rtype: tuple[float, int]
    """
    m = _check_indices(l, l_prime, m)
    lo, hi = sorted((l, l_prime))
    if table is None or len(table) < lo + hi + 1:
        table = LogFactorialTable.for_order(hi)
    half = _half_log(np.array([lo, hi]), m, table)
    log_magnitude = float(half[0] + half[1] + table[lo + hi])
    sign = -1 if (lo + hi) % 2 else 1
    return log_magnitude, sign


@dataclass(frozen=True, eq=False)
class CouplingBlock:
    """Symmetric block H^(m) of the multipolar matrix at one separation.

    :param m: azimuthal order (>= 0)
    :type m: int
    :param l_min: first multipole order in the block, max(1, m)
    :type l_min: int
    :param l_max: last multipole order in the block
    :type l_max: int
    :param x: image ratio a/(2(z + a))
    :type x: float
    :param entries: full block, diagonal n_l0 plus coupling
    :type entries: np.ndarray
    :param coupling: substrate-induced part only (entries minus diag(n_l0))
    :type coupling: np.ndarray
    """

    m: int
    l_min: int
    l_max: int
    x: float
    entries: np.ndarray
    coupling: np.ndarray

    @property
    def orders(self) -> np.ndarray:
        """Multipole orders labelling rows and columns."""
        return np.arange(self.l_min, self.l_max + 1)

    @property
    def size(self) -> int:
        """Number of rows (and eigenvalues) of the block."""
        return self.l_max - self.l_min + 1

    @property
    def degeneracy(self) -> int:
        """1 for m = 0, 2 otherwise (the -m block is identical)."""
        return 1 if self.m == 0 else 2

    def reference_eigenvalues(self) -> np.ndarray:
        """Sorted n_l0 of the decoupled block."""
        return isolated_sphere_eigenvalues(self.l_min, self.l_max)

    def rows(self) -> Iterator[tuple[int, int, float]]:
        """Yield ``(l, l', value)`` for every entry, row major."""
        orders = self.orders
        for i, l in enumerate(orders):  # noqa: E741
            for j, l_prime in enumerate(orders):
                yield int(l), int(l_prime), float(self.entries[i, j])


def build_block(
    geom: Geometry,
    contrast: SubstrateContrast,
    m: int,
    l_max: int,
    table: Optional[LogFactorialTable] = None,
) -> CouplingBlock:
    """Assemble the symmetric block H^(m) for orders max(1, m) .. l_max.

    The upper triangle is evaluated once in log space and mirrored, so the
    block is exactly symmetric.

    :param geom: sphere-plane geometry
    :type geom: Geometry
    :param contrast: substrate contrast factor
    :type contrast: SubstrateContrast
    :param m: azimuthal order; -m gives the same block
    :type m: int
    :param l_max: highest multipole order
    :type l_max: int
    :param table: log-factorial table, defaults to the shared one
    :type table: Optional[LogFactorialTable], optional
    :raises ConfigError: if ``|m| > l_max`` or the geometry ratio is not finite
    :return: the block
    :rtype: CouplingBlock
    """
    m = abs(int(m))
    if m > l_max:
        raise ConfigError(f"m={m} exceeds l_max={l_max}")
    log_x = geom.log_x
    if not math.isfinite(log_x):
        raise ConfigError(f"geometry ratio is not finite for z/a={geom.gap_over_radius!r}")
    if table is None or len(table) < 2 * l_max + 1:
        table = LogFactorialTable.for_order(l_max)

    l_min = max(1, m)
    ls = np.arange(l_min, l_max + 1)
    half = _half_log(ls, m, table)
    total = ls[:, None] + ls[None, :]
    log_magnitude = (half[:, None] + half[None, :]) + table[total]
    sign = np.where(total % 2 == 0, 1.0, -1.0)
    upper = np.triu(contrast.f_c * sign * np.exp(log_magnitude + (total + 1) * log_x))
    coupling = upper + np.triu(upper, 1).T

    entries = coupling.copy()
    entries[np.diag_indices_from(entries)] += ls / (2.0 * ls + 1.0)
    coupling.setflags(write=False)
    entries.setflags(write=False)
    return CouplingBlock(
        m=m,
        l_min=l_min,
        l_max=l_max,
        x=geom.x,
        entries=entries,
        coupling=coupling,
    )


def block_derivative(block: CouplingBlock, geom: Geometry) -> np.ndarray:
    """Analytic dH/d(z/a) of a block built at ``geom``.

    Every coupling entry carries x**(l + l' + 1), so the derivative is the
    coupling scaled by -(l + l' + 1)/(1 + z/a); n_l0 does not depend on z.
    """
    ls = block.orders
    powers = (ls[:, None] + ls[None, :] + 1).astype(float)
    return block.coupling * powers * geom.dlog_x()
