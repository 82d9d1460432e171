"""Mode spectrum, zero-point energy and force of the sphere-plane system.

Eigenvalues of each block H^(m) are the proper modes n_s(z) in the spectral
variable; for a lossless Drude sphere the mode frequency is w_p sqrt(n_s), so
the reduced interaction energy is

    E = 1/2 sum_m deg(m) sum_s [sqrt(n_s) - sqrt(n_l0)]

with eigenvalues paired to n_l0 by rank inside each block.
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Iterable, Optional, Sequence

import numpy as np
import scipy.linalg

from .coupling import LogFactorialTable, block_derivative, build_block
from .helpers import (
    ConfigError,
    ConvergenceError,
    EigensolverError,
    PoleProximityError,
    SignChangeError,
    UnphysicalEigenvalueError,
)
from .model import (
    DrudeSphere,
    ForceMethod,
    Geometry,
    SolverConfig,
    SubstrateContrast,
    mode_frequency_of_eigenvalue,
)

__all__ = [
    "BlockSpectrum",
    "ModeSpectrum",
    "EnergyResult",
    "ForceResult",
    "solve_block",
    "solve_spectrum",
    "green_function",
    "green_function_element",
    "zero_point_energy",
    "truncated_energy",
    "casimir_force",
    "hellmann_feynman_force",
    "energy_and_force",
    "SweepPoint",
    "local_exponent",
    "fit_power_law",
    "converge",
    "mode_table",
]

logger = logging.getLogger(__name__)

DEGENERACY_GAP = 1e-12
M_DROP_FACTOR = 0.1


@dataclass(frozen=True, eq=False)
class BlockSpectrum:
    """Eigen-decomposition of one azimuthal block.

    ``shifts`` holds n_s - n_l0 for the rank-paired reference. When the
    eigenvectors are kept, the shifts are Rayleigh quotients of H - n_l0, which
    keeps them accurate even when they are far below the eigenvalue spacing.
    """

    m: int
    l_min: int
    eigenvalues: np.ndarray
    references: np.ndarray
    shifts: np.ndarray
    eigenvectors: Optional[np.ndarray] = None

    @property
    def degeneracy(self) -> int:
        """1 for m = 0, 2 for m > 0."""
        return 1 if self.m == 0 else 2

    @property
    def l_max(self) -> int:
        """Highest multipole order in the block."""
        return self.l_min + len(self.eigenvalues) - 1

    def violations(self) -> list[float]:
        """Eigenvalues outside the physical interval (0, 1)."""
        values = self.eigenvalues
        return [float(v) for v in values[(values <= 0.0) | (values >= 1.0)]]

    def require_physical(self):
        """Raise if any eigenvalue is outside (0, 1)."""
        bad = self.violations()
        if bad:
            raise UnphysicalEigenvalueError(
                f"block m={self.m} has {len(bad)} eigenvalue(s) outside (0, 1), e.g. {bad[0]!r}",
                value=bad[0],
                m=self.m,
            )

    def energy_terms(self) -> np.ndarray:
        """sqrt(n_s) - sqrt(n_l0) per mode, without cancellation."""
        self.require_physical()
        return self.shifts / (np.sqrt(self.eigenvalues) + np.sqrt(self.references))


@dataclass(frozen=True, eq=False)
class ModeSpectrum:
    """All blocks m = 0 .. m_max of the spectrum at one separation."""

    per_m: tuple[BlockSpectrum, ...]
    gap_over_radius: float
    l_max_used: int
    m_max_used: int

    def violations(self) -> list[tuple[int, float]]:
        """``(m, n_s)`` for every unphysical eigenvalue."""
        return [(block.m, value) for block in self.per_m for value in block.violations()]

    def block(self, m: int) -> BlockSpectrum:
        """Spectrum of block ``|m|``."""
        m = abs(m)
        for block in self.per_m:
            if block.m == m:
                return block
        raise ConfigError(f"block m={m} was not solved (m_max_used={self.m_max_used})")

    def all_eigenvalues(self) -> np.ndarray:
        """Every mode with its m-degeneracy expanded, sorted ascending."""
        parts = [np.repeat(b.eigenvalues, b.degeneracy) for b in self.per_m]
        return np.sort(np.concatenate(parts))

    def max_reference_deviation(self) -> float:
        """Largest |n_s - n_l0| over all blocks."""
        return max(float(np.max(np.abs(b.shifts))) for b in self.per_m)


@dataclass(frozen=True)
class EnergyResult:
    """Reduced zero-point energy and its convergence record.

    :param energy_reduced: E / (hbar w_p)
    :type energy_reduced: float
    :param per_l_partials: running sums over the rank-paired l = 1 .. l_max
    :type per_l_partials: tuple[float, ...]
    :param converged: tail estimate is within the relative tolerance
    :type converged: bool
    :param est_truncation_error: nonnegative estimate of the missing tail
    :type est_truncation_error: float
    """

    energy_reduced: float
    per_l_partials: tuple[float, ...]
    converged: bool
    est_truncation_error: float


@dataclass(frozen=True)
class ForceResult:
    """Reduced force F a / (hbar w_p).

    :param force_reduced: the force; negative is attractive
    :type force_reduced: float
    :param method: how it was computed
    :type method: ForceMethod
    :param hf_fd_discrepancy: relative difference of both methods, only with ``BOTH``
    :type hf_fd_discrepancy: Optional[float]
    """

    force_reduced: float
    method: ForceMethod
    hf_fd_discrepancy: Optional[float] = None


def _map(fn: Callable, items: Sequence, threads: int = 1) -> list:
    """Ordered map, on a thread pool when more than one thread is asked for."""
    if threads <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def _eigh(matrix: np.ndarray, vectors: bool, m: int, l_max: int):
    try:
        if vectors:
            return scipy.linalg.eigh(matrix, check_finite=True)
        return scipy.linalg.eigh(matrix, eigvals_only=True, check_finite=True), None
    except (np.linalg.LinAlgError, ValueError, FloatingPointError) as e:
        raise EigensolverError(f"symmetric eigensolver failed: {e}", m=m, l_max=l_max) from e


def solve_block(
    geom: Geometry,
    contrast: SubstrateContrast,
    m: int,
    l_max: int,
    vectors: bool = False,
    table: Optional[LogFactorialTable] = None,
) -> BlockSpectrum:
    """Build and diagonalise block ``m``.

    :param vectors: keep eigenvectors and refine the shifts, defaults to False
    :type vectors: bool, optional
    """
    block = build_block(geom, contrast, m, l_max, table=table)
    eigenvalues, eigenvectors = _eigh(block.entries, vectors, block.m, l_max)
    references = block.reference_eigenvalues()
    if eigenvectors is None:
        shifts = eigenvalues - references
    else:
        # Rayleigh quotient of (H - n_ref) = (D - n_ref) + C for every pairing
        # D is diag(n_l0) in the same order as the references
        squared = eigenvectors * eigenvectors
        shifts = ((references[:, None] - references[None, :]) * squared).sum(axis=0)
        shifts += (eigenvectors * (block.coupling @ eigenvectors)).sum(axis=0)
    return BlockSpectrum(
        m=block.m,
        l_min=block.l_min,
        eigenvalues=eigenvalues,
        references=references,
        shifts=shifts,
        eigenvectors=eigenvectors,
    )


def solve_spectrum(
    geom: Geometry,
    contrast: SubstrateContrast,
    cfg: SolverConfig,
    vectors: bool = False,
    threads: int = 1,
) -> ModeSpectrum:
    """Eigenvalues of every block m = 0 .. cfg.m_max at one separation.

    Blocks are independent and may be solved on a thread pool; the result is
    ordered by m regardless of ``threads``.

    :param geom: sphere-plane geometry
    :type geom: Geometry
    :param contrast: substrate contrast factor
    :type contrast: SubstrateContrast
    :param cfg: truncation settings
    :type cfg: SolverConfig
    :param vectors: keep eigenvectors, defaults to False
    :type vectors: bool, optional
    :param threads: worker threads, defaults to 1
    :type threads: int, optional
    :return: the spectrum
    :rtype: ModeSpectrum
    """
    table = LogFactorialTable.for_order(cfg.l_max)
    ms = list(range(cfg.m_max + 1))
    blocks = _map(
        lambda m: solve_block(geom, contrast, m, cfg.l_max, vectors=vectors, table=table),
        ms,
        threads,
    )
    return ModeSpectrum(
        per_m=tuple(blocks),
        gap_over_radius=geom.gap_over_radius,
        l_max_used=cfg.l_max,
        m_max_used=cfg.m_max,
    )


def green_function(block: BlockSpectrum, u: float, pole_epsilon: float = 1e-12) -> np.ndarray:
    """Full Green's function G(u) = sum_s U_s U_s^T / (u - n_s) of one block.

    :raises PoleProximityError: if ``u`` is within ``pole_epsilon`` of an eigenvalue
    """
    if block.eigenvectors is None:
        raise ConfigError("Green's functions need a block solved with vectors=True")
    distance = u - block.eigenvalues
    closest = float(np.min(np.abs(distance)))
    if closest < pole_epsilon:
        raise PoleProximityError(
            f"u={u!r} lies {closest:.3e} from a pole of block m={block.m}"
        )
    vecs = block.eigenvectors
    return (vecs / distance[None, :]) @ vecs.T


def green_function_element(
    block: BlockSpectrum,
    u: float,
    i: int,
    j: int,
    pole_epsilon: float = 1e-12,
) -> float:
    """Element G_ij(u) = sum_s U_is U_js / (u - n_s) of one block.

    H is real symmetric, so U^-1 = U^T.

    :param block: block spectrum with eigenvectors
    :type block: BlockSpectrum
    :param u: real spectral variable away from the poles
    :type u: float
    :param i: row index inside the block
    :type i: int
    :param j: column index inside the block
    :type j: int
    :param pole_epsilon: closest allowed distance to a pole, defaults to 1e-12
    :type pole_epsilon: float, optional
    :raises PoleProximityError: if ``u`` is within ``pole_epsilon`` of an eigenvalue
    :return: G_ij(u)
    :rtype: float
    """
    if block.eigenvectors is None:
        raise ConfigError("Green's functions need a block solved with vectors=True")
    distance = u - block.eigenvalues
    closest = float(np.min(np.abs(distance)))
    if closest < pole_epsilon:
        raise PoleProximityError(
            f"u={u!r} lies {closest:.3e} from a pole of block m={block.m}"
        )
    vecs = block.eigenvectors
    return float(np.sum(vecs[i, :] * vecs[j, :] / distance))


def _tail_estimate(per_l: np.ndarray) -> float:
    """Geometric extrapolation of the terms past the last order."""
    if len(per_l) == 0:
        return 0.0
    last = float(per_l[-1])
    if len(per_l) < 2 or per_l[-2] == 0.0:
        return abs(last)
    ratio = last / float(per_l[-2])
    if 0.0 < ratio < 1.0:
        return abs(last) * ratio / (1.0 - ratio)
    return abs(last)


def _energy_from_blocks(
    blocks: Iterable[BlockSpectrum], l_max: int, cfg: SolverConfig
) -> EnergyResult:
    per_l = np.zeros(l_max)
    for block in blocks:
        contributions = 0.5 * block.degeneracy * block.energy_terms()
        per_l[block.l_min - 1 :] += contributions
    partials = np.cumsum(per_l)
    energy = float(partials[-1]) if len(partials) else 0.0
    error = _tail_estimate(per_l)
    return EnergyResult(
        energy_reduced=energy,
        per_l_partials=tuple(float(p) for p in partials),
        converged=error <= cfg.energy_rel_tol * abs(energy),
        est_truncation_error=error,
    )


def zero_point_energy(spectrum: ModeSpectrum, cfg: SolverConfig) -> EnergyResult:
    """Reduced interaction energy E / (hbar w_p) of a solved spectrum.

    :param spectrum: mode spectrum
    :type spectrum: ModeSpectrum
    :param cfg: solver settings, only the tolerance is used
    :type cfg: SolverConfig
    :raises UnphysicalEigenvalueError: if any eigenvalue is outside (0, 1)
    :return: energy with partial sums over l and a tail estimate
    :rtype: EnergyResult
    """
    bad = spectrum.violations()
    if bad:
        m, value = bad[0]
        raise UnphysicalEigenvalueError(
            f"{len(bad)} eigenvalue(s) outside (0, 1) at z/a={spectrum.gap_over_radius!r}, "
            f"first in block m={m}: {value!r}",
            value=value,
            m=m,
        )
    return _energy_from_blocks(spectrum.per_m, spectrum.l_max_used, cfg)


def truncated_energy(
    geom: Geometry,
    contrast: SubstrateContrast,
    cfg: SolverConfig,
    vectors: bool = False,
    threads: int = 1,
) -> tuple[EnergyResult, int]:
    """Energy at ``cfg.l_max`` stopping at the first negligible m block.

    Blocks are solved in order of increasing m (``threads`` at a time); the
    first block whose contribution is below ``energy_rel_tol / 10`` of the
    running total is the last one kept.

    :return: the energy and the last m block included
    :rtype: tuple[EnergyResult, int]
    """
    table = LogFactorialTable.for_order(cfg.l_max)
    threshold = cfg.energy_rel_tol * M_DROP_FACTOR
    kept: list[BlockSpectrum] = []
    running = 0.0
    m = 0
    batch = max(1, threads)
    with ThreadPoolExecutor(max_workers=batch) as pool:
        while m <= cfg.m_max:
            ms = list(range(m, min(m + batch, cfg.m_max + 1)))
            solved = pool.map(
                lambda k: solve_block(geom, contrast, k, cfg.l_max, vectors=vectors, table=table),
                ms,
            )
            for block in solved:
                contribution = 0.5 * block.degeneracy * float(np.sum(block.energy_terms()))
                kept.append(block)
                running += contribution
                if block.m > 0 and abs(contribution) <= threshold * abs(running):
                    logger.debug(
                        "z/a=%g l_max=%d: dropping blocks above m=%d",
                        geom.gap_over_radius,
                        cfg.l_max,
                        block.m,
                    )
                    return _energy_from_blocks(kept, cfg.l_max, cfg), block.m
            m = ms[-1] + 1
    return _energy_from_blocks(kept, cfg.l_max, cfg), cfg.m_max


def _hf_block_force(
    spectrum: BlockSpectrum, geom: Geometry, contrast: SubstrateContrast, table: LogFactorialTable
) -> float:
    spectrum.require_physical()
    eigenvalues, eigenvectors = spectrum.eigenvalues, spectrum.eigenvectors
    if len(eigenvalues) > 1 and float(np.min(np.diff(eigenvalues))) < DEGENERACY_GAP:
        logger.warning(
            "near-degenerate eigenvalues in block m=%d at z/a=%g; "
            "Hellmann-Feynman derivative is still valid for symmetric H",
            spectrum.m,
            geom.gap_over_radius,
        )
    block = build_block(geom, contrast, spectrum.m, spectrum.l_max, table=table)
    derivative = block_derivative(block, geom)
    slopes = (eigenvectors * (derivative @ eigenvectors)).sum(axis=0)
    return -spectrum.degeneracy * float(np.sum(slopes / (4.0 * np.sqrt(eigenvalues))))


def hellmann_feynman_force(
    spectrum: ModeSpectrum, geom: Geometry, contrast: SubstrateContrast
) -> float:
    """Force from eigenvalue slopes dn_s/dz = U_s^T (dH/dz) U_s.

    :param spectrum: spectrum solved with ``vectors=True`` at ``geom``
    :type spectrum: ModeSpectrum
    :param geom: geometry the spectrum belongs to
    :type geom: Geometry
    :param contrast: substrate contrast factor
    :type contrast: SubstrateContrast
    :raises ConfigError: if eigenvectors are missing or the geometry does not match
    :return: reduced force
    :rtype: float
    """
    if spectrum.gap_over_radius != geom.gap_over_radius:
        raise ConfigError("spectrum was solved at a different separation")
    if any(block.eigenvectors is None for block in spectrum.per_m):
        raise ConfigError("Hellmann-Feynman forces need a spectrum solved with vectors=True")
    table = LogFactorialTable.for_order(spectrum.l_max_used)
    parts = [_hf_block_force(block, geom, contrast, table) for block in spectrum.per_m]
    return float(math.fsum(parts))


def _hf_force(geom, contrast, cfg: SolverConfig, threads: int) -> float:
    spectrum = solve_spectrum(geom, contrast, cfg, vectors=True, threads=threads)
    return hellmann_feynman_force(spectrum, geom, contrast)


def _fd_force(geom, contrast, cfg: SolverConfig, threads: int) -> float:
    if cfg.fd_step_rel >= 1.0:
        raise ConfigError(f"fd_step_rel must be below 1, got {cfg.fd_step_rel!r}")
    step = cfg.fd_step_rel * geom.gap_over_radius
    energies = []
    for z in (geom.gap_over_radius + step, geom.gap_over_radius - step):
        spectrum = solve_spectrum(Geometry(z), contrast, cfg, vectors=True, threads=threads)
        energies.append(zero_point_energy(spectrum, cfg).energy_reduced)
    return -(energies[0] - energies[1]) / (2.0 * step)


def casimir_force(
    geom: Geometry,
    contrast: SubstrateContrast,
    cfg: SolverConfig,
    threads: int = 1,
) -> ForceResult:
    """Reduced force F a / (hbar w_p) = -dE/d(z/a) at ``cfg``'s truncation.

    :param geom: sphere-plane geometry
    :type geom: Geometry
    :param contrast: substrate contrast factor
    :type contrast: SubstrateContrast
    :param cfg: solver settings, ``force_method`` picks the derivative
    :type cfg: SolverConfig
    :param threads: worker threads, defaults to 1
    :type threads: int, optional
    :return: the force, plus the method discrepancy with ``BOTH``
    :rtype: ForceResult
    """
    method = cfg.force_method
    if method is ForceMethod.HELLMANN_FEYNMAN:
        return ForceResult(_hf_force(geom, contrast, cfg, threads), method)
    if method is ForceMethod.FINITE_DIFFERENCE:
        return ForceResult(_fd_force(geom, contrast, cfg, threads), method)
    hf = _hf_force(geom, contrast, cfg, threads)
    fd = _fd_force(geom, contrast, cfg, threads)
    discrepancy = abs(hf - fd) / max(abs(hf), np.finfo(float).tiny)
    return ForceResult(hf, method, hf_fd_discrepancy=discrepancy)


def _signed_logs(values: Sequence[float], what: str) -> np.ndarray:
    values = np.asarray(values, dtype=float)
    signs = np.sign(values)
    if np.any(signs == 0) or np.any(signs != signs[0]):
        raise SignChangeError(f"{what} changes sign or vanishes inside the sweep")
    return np.log(np.abs(values))


def local_exponent(sweep: Sequence[tuple[float, float]]) -> list[tuple[float, float]]:
    """Local power-law exponent beta(z) = -d ln|F| / d ln(z/a).

    Centred differences on the log grid, so only interior points get a value.
    Works for force or energy sweeps alike.

    :param sweep: ``(z/a, value)`` pairs with strictly increasing z/a
    :type sweep: Sequence[tuple[float, float]]
    :raises ConfigError: fewer than 3 points or a non-increasing grid
    :raises SignChangeError: values of mixed sign
    :return: ``(z/a, beta)`` for every interior point
    :rtype: list[tuple[float, float]]
    """
    if len(sweep) < 3:
        raise ConfigError(f"local exponent needs at least 3 points, got {len(sweep)}")
    zs = np.array([row[0] for row in sweep], dtype=float)
    if np.any(zs <= 0) or np.any(np.diff(zs) <= 0):
        raise ConfigError("sweep separations must be positive and strictly increasing")
    log_f = _signed_logs([row[1] for row in sweep], "sweep value")
    log_z = np.log(zs)
    beta = -(log_f[2:] - log_f[:-2]) / (log_z[2:] - log_z[:-2])
    return [(float(z), float(b)) for z, b in zip(zs[1:-1], beta)]


def fit_power_law(xs: Sequence[float], ys: Sequence[float]) -> float:
    """Least-squares slope of ln|y| against ln x."""
    if len(xs) < 2:
        raise ConfigError("need at least two points for a power-law fit")
    log_y = _signed_logs(ys, "fitted value")
    slope, _ = np.polyfit(np.log(np.asarray(xs, dtype=float)), log_y, 1)
    return float(slope)


def _ladder(start: int, cap: int) -> list[int]:
    rungs = []
    l_max = start
    while l_max < cap:
        rungs.append(l_max)
        l_max *= 2
    rungs.append(cap)
    return rungs


def converge(
    geom: Geometry,
    contrast: SubstrateContrast,
    cfg: SolverConfig,
    threads: int = 1,
    on_rung: Optional[Callable[[int, EnergyResult, int], None]] = None,
) -> tuple[EnergyResult, int, int]:
    """Double ``l_max`` from 8 until the energy settles to ``energy_rel_tol``.

    Each rung is compared to the energy at exactly half its ``l_max``; ``cfg.l_max``
    is the cap. A cap that is not a doubling of the start costs one extra solve
    at cap/2. High-m blocks are dropped as in :func:`truncated_energy`.

    :param on_rung: called with ``(l_max, energy, m_max_used)`` after every rung
    :type on_rung: Optional[Callable[[int, EnergyResult, int], None]], optional
    :raises ConfigError: if adaptive truncation is switched off in ``cfg``
    :raises ConvergenceError: if the cap is reached first; carries the energies at
        cap/2 and at the cap
    :return: energy at the accepted rung, its ``l_max`` and ``m_max``
    :rtype: tuple[EnergyResult, int, int]
    """
    if not cfg.adaptive_truncation:
        raise ConfigError("converge needs adaptive_truncation=True")
    solved: dict[int, tuple[EnergyResult, int]] = {}

    def energy_at(l_max: int) -> tuple[EnergyResult, int]:
        if l_max not in solved:
            solved[l_max] = truncated_energy(geom, contrast, cfg.truncated(l_max), threads=threads)
        return solved[l_max]

    for l_max in _ladder(cfg.start_l_max, cfg.l_max):
        half, _ = energy_at(max(1, l_max // 2))
        current, m_used = energy_at(l_max)
        if on_rung is not None:
            on_rung(l_max, current, m_used)
        delta = abs(current.energy_reduced - half.energy_reduced)
        if delta <= cfg.energy_rel_tol * abs(current.energy_reduced):
            logger.info(
                "z/a=%g converged at l_max=%d, m_max=%d", geom.gap_over_radius, l_max, m_used
            )
            return current, l_max, m_used
    raise ConvergenceError(
        f"energy at z/a={geom.gap_over_radius!r} not converged to {cfg.energy_rel_tol:g} "
        f"by l_max={cfg.l_max}",
        partials=(half.energy_reduced, current.energy_reduced),
    )


@dataclass(frozen=True)
class SweepPoint:
    """Energy and force of the full model at one separation."""

    gap_over_radius: float
    energy: EnergyResult
    force: ForceResult
    l_max_used: int
    m_max_used: int
    converged: bool


def energy_and_force(
    geom: Geometry,
    contrast: SubstrateContrast,
    cfg: SolverConfig,
    threads: int = 1,
    strict: bool = True,
) -> SweepPoint:
    """Evaluate one sweep point, converging the truncation first if asked to.

    With adaptive truncation and ``strict=False`` a point that misses the
    tolerance is evaluated at the cap and flagged ``converged=False`` instead
    of raising. Hellmann-Feynman forces reuse the eigenvectors of the energy
    solve.

    :param geom: sphere-plane geometry
    :type geom: Geometry
    :param contrast: substrate contrast factor
    :type contrast: SubstrateContrast
    :param cfg: solver settings
    :type cfg: SolverConfig
    :param threads: worker threads, defaults to 1
    :type threads: int, optional
    :param strict: re-raise :class:`ConvergenceError`, defaults to True
    :type strict: bool, optional
    :return: the evaluated point
    :rtype: SweepPoint
    """
    converged = True
    if cfg.adaptive_truncation:
        try:
            _, l_max, m_max = converge(geom, contrast, cfg, threads=threads)
            cfg = cfg.truncated(l_max, m_max)
        except ConvergenceError as e:
            if strict:
                raise
            logger.warning("%s; keeping the l_max=%d result", e, cfg.l_max)
            converged = False

    spectrum = solve_spectrum(geom, contrast, cfg, vectors=True, threads=threads)
    energy = zero_point_energy(spectrum, cfg)
    if cfg.force_method is ForceMethod.HELLMANN_FEYNMAN:
        force = ForceResult(hellmann_feynman_force(spectrum, geom, contrast), cfg.force_method)
    else:
        force = casimir_force(geom, contrast, cfg, threads=threads)
    if not cfg.adaptive_truncation:
        converged = energy.converged
    return SweepPoint(
        gap_over_radius=geom.gap_over_radius,
        energy=energy,
        force=force,
        l_max_used=cfg.l_max,
        m_max_used=cfg.m_max,
        converged=converged,
    )


def mode_table(spectrum: ModeSpectrum, sphere: DrudeSphere) -> list[dict]:
    """Per-mode listing: m, rank, n_s, n_l0 and the Drude mode frequency."""
    rows = []
    for block in spectrum.per_m:
        for rank, (n_s, n_ref) in enumerate(zip(block.eigenvalues, block.references)):
            omega = mode_frequency_of_eigenvalue(sphere, float(n_s))
            rows.append(
                {
                    "m": block.m,
                    "degeneracy": block.degeneracy,
                    "l_paired": block.l_min + rank,
                    "n_s": float(n_s),
                    "n_l0": float(n_ref),
                    "omega_real": omega.real,
                    "omega_imag": omega.imag,
                }
            )
    return rows
