"""Independent slow implementations that the fast path is checked against.

Blocks are assembled with exact rational arithmetic from the unsymmetrised
coupling

    M[l, l'] = n_l0 delta
              + f_c n_l0 (-1)**(l + l') (l + l')! / ((l' + m)! (l - m)!) x**(l + l' + 1)

which is rational whenever z/a and f_c are. The symmetric block follows from
H[l, l'] = sign(M[l, l']) sqrt(M[l, l'] M[l', l]), evaluated with mpmath.
"""

import json
import logging
import math
from dataclasses import asdict, dataclass
from fractions import Fraction
from typing import Optional

import mpmath
import numpy as np

from .coupling import build_block
from .helpers import ConfigError, ConvergenceError
from .model import Geometry, SolverConfig, SubstrateContrast
from .reference import dipole_energy_force, dipole_modes
from .spectral import solve_block, solve_spectrum, zero_point_energy

__all__ = [
    "ORACLE_MAX_ORDER",
    "OracleReport",
    "rational_block",
    "brute_force_block",
    "oracle_eigenvalues",
    "oracle_dipole_energy",
    "power_iteration_extreme_eigenvalue",
    "run_oracle_suite",
    "first_failure",
]

logger = logging.getLogger(__name__)

ORACLE_MAX_ORDER = 6
ORACLE_DPS = 50
POWER_ITERATION_TOL = 1e-10
POWER_ITERATION_CAP = 1_000_000
POWER_BLOCK_ORDER = 32


@dataclass(frozen=True)
class OracleReport:
    """Outcome of one oracle comparison."""

    case_id: str
    expected: float
    got: float
    rel_error: float
    tolerance: float
    passed: bool

    def __post_init__(self):
        """``passed`` must agree with the error and tolerance."""
        if self.passed != (self.rel_error <= self.tolerance):
            raise ConfigError(f"inconsistent oracle report for `{self.case_id}`")

    @classmethod
    def compare(
        cls, case_id: str, expected: float, got: float, tolerance: float
    ) -> "OracleReport":
        """Build a report from an expected and an obtained value."""
        expected, got = float(expected), float(got)
        if expected == got:
            rel_error = 0.0
        else:
            rel_error = abs(got - expected) / max(abs(expected), np.finfo(float).tiny)
        return cls(case_id, expected, got, rel_error, tolerance, rel_error <= tolerance)

    def to_json(self) -> str:
        """One JSON line for CI logs."""
        return json.dumps(asdict(self), sort_keys=True)


def _check_order(m: int, l_max: int) -> int:
    m = abs(int(m))
    if l_max > ORACLE_MAX_ORDER:
        raise ConfigError(f"oracle blocks are limited to l_max <= {ORACLE_MAX_ORDER}, got {l_max}")
    if m > l_max:
        raise ConfigError(f"m={m} exceeds l_max={l_max}")
    return m


def rational_block(
    geom: Geometry, contrast: SubstrateContrast, m: int, l_max: int
) -> list[list[Fraction]]:
    """Unsymmetrised block M as exact fractions, rows and columns l = max(1, m) .. l_max.

    The float inputs are taken at their exact binary value.
    """
    m = _check_order(m, l_max)
    x = Fraction(1, 2) / (1 + Fraction(geom.gap_over_radius))
    f_c = Fraction(contrast.f_c)
    orders = range(max(1, m), l_max + 1)
    rows = []
    for l in orders:  # noqa: E741
        n_l0 = Fraction(l, 2 * l + 1)
        row = []
        for l_prime in orders:
            coefficient = Fraction(
                math.factorial(l + l_prime),
                math.factorial(l_prime + m) * math.factorial(l - m),
            )
            value = f_c * n_l0 * (-1) ** (l + l_prime) * coefficient * x ** (l + l_prime + 1)
            if l == l_prime:
                value += n_l0
            row.append(value)
        rows.append(row)
    return rows


def _mpf(value: Fraction) -> mpmath.mpf:
    return mpmath.mpf(value.numerator) / value.denominator


def brute_force_block(
    geom: Geometry, contrast: SubstrateContrast, m: int, l_max: int
) -> np.ndarray:
    """Symmetric block H from the exact M, rounded to double precision at the end.

    :param geom: sphere-plane geometry
    :type geom: Geometry
    :param contrast: substrate contrast factor
    :type contrast: SubstrateContrast
    :param m: azimuthal order
    :type m: int
    :param l_max: highest multipole order, at most 6
    :type l_max: int
    :raises ConfigError: if ``l_max`` exceeds 6 or ``m`` exceeds ``l_max``
    :return: the dense symmetric block
    :rtype: np.ndarray
    """
    exact = rational_block(geom, contrast, m, l_max)
    size = len(exact)
    block = np.zeros((size, size))
    with mpmath.workdps(ORACLE_DPS):
        for i in range(size):
            block[i, i] = float(_mpf(exact[i][i]))
            for j in range(i + 1, size):
                product = exact[i][j] * exact[j][i]
                if product == 0:
                    continue
                sign = 1 if exact[i][j] > 0 else -1
                value = float(sign * mpmath.sqrt(_mpf(product)))
                block[i, j] = block[j, i] = value
    return block


def oracle_eigenvalues(
    geom: Geometry, contrast: SubstrateContrast, m: int, l_max: int
) -> list[float]:
    """Eigenvalues of the unsymmetrised M at 50 digits, ascending."""
    exact = rational_block(geom, contrast, m, l_max)
    with mpmath.workdps(ORACLE_DPS):
        matrix = mpmath.matrix([[_mpf(value) for value in row] for row in exact])
        eigenvalues = mpmath.eig(matrix, left=False, right=False)
        return sorted(float(mpmath.re(value)) for value in eigenvalues)


def oracle_dipole_energy(geom: Geometry, contrast: SubstrateContrast) -> float:
    """Dipolar energy from the exact l_max = 1 blocks at 50 digits."""
    with mpmath.workdps(ORACLE_DPS):
        total = mpmath.mpf(0)
        reference = mpmath.sqrt(mpmath.mpf(1) / 3)
        for m in (0, 1):
            n_s = _mpf(rational_block(geom, contrast, m, 1)[0][0])
            total += (1 if m == 0 else 2) * (mpmath.sqrt(n_s) - reference)
        return float(total / 2)


def power_iteration_extreme_eigenvalue(
    block: np.ndarray,
    tol: float = POWER_ITERATION_TOL,
    max_iterations: int = POWER_ITERATION_CAP,
    seed: int = 0,
) -> float:
    """Largest eigenvalue of a symmetric matrix by shifted power iteration.

    The matrix is shifted by its Gershgorin lower bound so every eigenvalue is
    nonnegative and the largest one dominates.

    :param block: real symmetric matrix
    :type block: np.ndarray
    :param tol: residual norm ||A v - lambda v|| at which to stop, defaults to 1e-10
    :type tol: float, optional
    :param max_iterations: iteration cap, defaults to 1000000
    :type max_iterations: int, optional
    :param seed: seed of the start vector, defaults to 0
    :type seed: int, optional
    :raises ConfigError: if the matrix is not square and symmetric
    :raises ConvergenceError: if the cap is hit first
    :return: the largest eigenvalue
    :rtype: float
    """
    block = np.asarray(block, dtype=float)
    if block.ndim != 2 or block.shape[0] != block.shape[1] or not np.allclose(block, block.T):
        raise ConfigError("power iteration needs a square symmetric matrix")
    radii = np.sum(np.abs(block), axis=1) - np.abs(np.diag(block))
    shift = float(np.min(np.diag(block) - radii))
    shifted = block - shift * np.eye(len(block))

    vector = np.random.default_rng(seed).standard_normal(len(block))
    vector /= np.linalg.norm(vector)
    estimate = float(vector @ shifted @ vector)
    for _ in range(max_iterations):
        image = shifted @ vector
        estimate = float(vector @ image)
        if np.linalg.norm(image - estimate * vector) < tol:
            return estimate + shift
        norm = np.linalg.norm(image)
        if norm == 0.0:
            return shift
        vector = image / norm
    raise ConvergenceError(
        f"power iteration did not reach {tol:g} in {max_iterations} steps",
        partials=(estimate + shift,),
    )


def _block_case(case_id: str, geom, contrast, l_max: int, tolerance: float) -> OracleReport:
    """Worst entrywise relative error of the production blocks against the oracle."""
    worst = 0.0
    expected_at = got_at = 0.0
    for m in range(l_max + 1):
        oracle = brute_force_block(geom, contrast, m, l_max)
        fast = build_block(geom, contrast, m, l_max).entries
        mask = oracle != 0.0
        errors = np.abs(fast[mask] - oracle[mask]) / np.abs(oracle[mask])
        if errors.size and errors.max() > worst:
            k = int(np.argmax(errors))
            worst = float(errors[k])
            expected_at, got_at = float(oracle[mask][k]), float(fast[mask][k])
    return OracleReport(case_id, expected_at, got_at, worst, tolerance, worst <= tolerance)


def run_oracle_suite(
    draws: int = 20, power_draws: int = 50, seed: int = 20060101, l_max: int = 4
) -> list[OracleReport]:
    """Compare the production path against the oracles.

    :param draws: random (z/a, f_c) pairs for the block comparison, defaults to 20
    :type draws: int, optional
    :param power_draws: random production blocks with l_max = 32 checked by power
        iteration against the dense eigensolver, defaults to 50
    :type power_draws: int, optional
    :param seed: random seed, defaults to 20060101
    :type seed: int, optional
    :param l_max: block size for the comparison, defaults to 4
    :type l_max: int, optional
    :return: one report per case
    :rtype: list[OracleReport]
    """
    rng = np.random.default_rng(seed)
    reports = []

    conductor = SubstrateContrast(-1.0)
    unit = Geometry(1.0)
    modes = dipole_modes(unit, conductor)
    for m, expected in ((0, modes[2]), (1, modes[0])):
        got = oracle_eigenvalues(unit, conductor, m, 1)[0]
        reports.append(OracleReport.compare(f"dipole_mode_m{m}", expected, got, 1e-14))
    reports.append(
        OracleReport.compare(
            "dipole_energy_closed_form",
            oracle_dipole_energy(unit, conductor),
            dipole_energy_force(unit, conductor)[0],
            1e-12,
        )
    )
    spectrum = solve_spectrum(unit, conductor, SolverConfig(l_max=1), vectors=True)
    reports.append(
        OracleReport.compare(
            "dipole_energy_spectral",
            oracle_dipole_energy(unit, conductor),
            zero_point_energy(spectrum, SolverConfig(l_max=1)).energy_reduced,
            1e-12,
        )
    )

    for draw in range(draws):
        z = float(10 ** rng.uniform(-1.3, 1.0))
        f_c = float(rng.uniform(-1.0, 1.0))
        reports.append(
            _block_case(
                f"block_l{l_max}_draw{draw:02d}", Geometry(z), SubstrateContrast(f_c), l_max, 1e-10
            )
        )

    for draw in range(power_draws):
        geom = Geometry(float(10 ** rng.uniform(-0.3, 1.0)))
        contrast = SubstrateContrast(float(rng.uniform(-1.0, 1.0)))
        m = int(rng.integers(0, 9))
        block = build_block(geom, contrast, m, POWER_BLOCK_ORDER).entries
        expected = float(solve_block(geom, contrast, m, POWER_BLOCK_ORDER).eigenvalues[-1])
        got = power_iteration_extreme_eigenvalue(block)
        case_id = f"power_iteration_m{m}_draw{draw:02d}"
        reports.append(OracleReport.compare(case_id, expected, got, 1e-9))

    failed = sum(not report.passed for report in reports)
    logger.info("oracle suite: %d cases, %d failed", len(reports), failed)
    return reports


def first_failure(reports: list[OracleReport]) -> Optional[OracleReport]:
    """First report that did not pass, if any."""
    return next((report for report in reports if not report.passed), None)
