"""Test the mode spectrum, energy and force."""

import unittest
from unittest import mock

import numpy as np

from sphereplate import (
    ConfigError,
    ConvergenceError,
    ForceMethod,
    Geometry,
    SubstrateContrast,
    build_block,
    casimir_force,
    converge,
    dipole_energy_force,
    energy_and_force,
    green_function_element,
    local_exponent,
    solve_spectrum,
    zero_point_energy,
)
from sphereplate.helpers import (
    EigensolverError,
    PoleProximityError,
    SignChangeError,
    UnphysicalEigenvalueError,
    exit_code,
)
from sphereplate.model import DrudeSphere
from sphereplate.spectral import (
    BlockSpectrum,
    ModeSpectrum,
    fit_power_law,
    green_function,
    hellmann_feynman_force,
    mode_table,
    solve_block,
    truncated_energy,
)

from . import SpherePlateTests


class SpectrumTests(SpherePlateTests):
    """Eigenvalues of H."""

    def test_01_mode_count(self):
        """Every (l, m) pair gives one mode."""
        spectrum = solve_spectrum(Geometry(1.0), self.conductor, self.solver(5))
        self.assertEqual(len(spectrum.per_m), 6)
        self.assertEqual(len(spectrum.all_eigenvalues()), 5 * 7)
        self.assertEqual(spectrum.block(-3).m, 3)
        with self.assertRaises(ConfigError):
            spectrum.block(6)

    def test_02_physical_range(self):
        """Eigenvalues stay in (0, 1) close to contact."""
        spectrum = solve_spectrum(Geometry(0.1), self.conductor, self.solver(40))
        self.assertListEqual(spectrum.violations(), [])
        values = spectrum.all_eigenvalues()
        self._display("lowest modes at z/a=0.1", values[:6])
        self.assertGreater(values[0], 0.0)
        self.assertLess(values[-1], 1.0)

    def test_03_conductor_lowers_modes(self):
        """A conductor pulls every dipole mode below 1/3."""
        spectrum = solve_spectrum(Geometry(1.0), self.conductor, self.solver(1))
        for value in spectrum.all_eigenvalues():
            self.assertLess(value, 1.0 / 3.0)

    def test_04_thread_count_irrelevant(self):
        """Thread pools return the same spectrum in the same order."""
        geom, cfg = Geometry(0.3), self.solver(24)
        serial = solve_spectrum(geom, self.conductor, cfg, threads=1)
        pooled = solve_spectrum(geom, self.conductor, cfg, threads=4)
        for one, other in zip(serial.per_m, pooled.per_m):
            self.assertEqual(one.m, other.m)
            self.assertTrue(np.array_equal(one.eigenvalues, other.eigenvalues))

    def test_05_mode_table(self):
        """One row per block eigenvalue with its Drude frequency."""
        spectrum = solve_spectrum(Geometry(1.0), self.conductor, self.solver(3))
        rows = mode_table(spectrum, DrudeSphere())
        self.assertEqual(len(rows), 3 + 3 + 2 + 1)
        for row in rows:
            self.assertAlmostEqual(row["omega_real"], np.sqrt(row["n_s"]), places=14)
            self.assertEqual(row["omega_imag"], 0.0)
        self.assertEqual(rows[0]["l_paired"], 1)

    def test_06_mode_continuity(self):
        """Far from the plate every mode returns to its isolated-sphere value."""
        deviations = []
        for z in (10.0, 100.0, 250.0):
            geom = Geometry(z)
            spectrum = solve_spectrum(geom, self.conductor, self.solver(10))
            deviations.append(spectrum.max_reference_deviation())
        self.assertStrictlyIncreasing(deviations[::-1])
        # the m = 0 dipole shift (2/3) x^3 is the largest one
        self.assertRelClose(deviations[1], 2.0 * Geometry(100.0).x ** 3 / 3.0, 1e-3)
        self.assertLess(deviations[1], 1e-7)
        self.assertLess(deviations[2], 1e-8)

    def test_07_eigensolver_failure(self):
        """Failures of the dense eigensolver name the block and map to exit 4."""
        for error in (np.linalg.LinAlgError("did not converge"), FloatingPointError("overflow")):
            with mock.patch("scipy.linalg.eigh", side_effect=error):
                with self.assertRaises(EigensolverError) as ctx:
                    solve_block(Geometry(1.0), self.conductor, 2, 6)
            self.assertEqual((ctx.exception.m, ctx.exception.l_max), (2, 6))
            self.assertEqual(exit_code(ctx.exception), 4)


class EnergyTests(SpherePlateTests):
    """Zero-point energy."""

    def test_01_dipole_limit(self):
        """l_max = 1 reproduces the closed-form dipole energy and force."""
        for f_c in (-1.0, -0.5):
            contrast = SubstrateContrast(f_c)
            for z in np.geomspace(0.01, 100.0, 50):
                geom = Geometry(float(z))
                cfg = self.solver(1)
                spectrum = solve_spectrum(geom, contrast, cfg, vectors=True)
                energy = zero_point_energy(spectrum, cfg).energy_reduced
                force = hellmann_feynman_force(spectrum, geom, contrast)
                expected_energy, expected_force = dipole_energy_force(geom, contrast)
                self.assertRelClose(energy, expected_energy, 1e-12)
                self.assertRelClose(force, expected_force, 1e-12)

    def test_02_dipole_value(self):
        """Perfect conductor at z/a = 1 in the dipole model."""
        spectrum = solve_spectrum(Geometry(1.0), self.conductor, self.solver(1), vectors=True)
        energy = zero_point_energy(spectrum, self.solver(1)).energy_reduced
        self.assertRelClose(energy, -0.0090747, 1e-4)

    def test_03_partials(self):
        """Partial sums over l end at the total and converge far away."""
        cfg = self.solver(12)
        result = zero_point_energy(solve_spectrum(Geometry(10.0), self.conductor, cfg), cfg)
        self.assertEqual(len(result.per_l_partials), 12)
        self.assertEqual(result.per_l_partials[-1], result.energy_reduced)
        self.assertLess(result.energy_reduced, 0.0)
        self.assertTrue(result.converged)
        self.assertGreaterEqual(result.est_truncation_error, 0.0)

    def test_04_unphysical_spectrum(self):
        """Energies refuse eigenvalues outside (0, 1)."""
        block = BlockSpectrum(
            m=0,
            l_min=1,
            eigenvalues=np.array([1.2]),
            references=np.array([1.0 / 3.0]),
            shifts=np.array([1.2 - 1.0 / 3.0]),
        )
        spectrum = ModeSpectrum(per_m=(block,), gap_over_radius=1.0, l_max_used=1, m_max_used=0)
        with self.assertRaises(UnphysicalEigenvalueError) as ctx:
            zero_point_energy(spectrum, self.solver(1))
        self.assertEqual(ctx.exception.m, 0)

    def test_05_dropped_blocks(self):
        """High-m blocks below the tolerance are not solved."""
        cfg = self.solver(16, energy_rel_tol=1e-6)
        result, m_used = truncated_energy(Geometry(20.0), self.conductor, cfg)
        self.assertLess(m_used, 16)
        full = zero_point_energy(solve_spectrum(Geometry(20.0), self.conductor, cfg), cfg)
        self.assertRelClose(result.energy_reduced, full.energy_reduced, 1e-6)


class ConvergeTests(SpherePlateTests):
    """Adaptive truncation."""

    def test_01_far_field(self):
        """Far from the plate the first doubling already settles."""
        cfg = self.solver(32, adaptive_truncation=True)
        result, l_max, m_max = converge(Geometry(10.0), self.conductor, cfg)
        self.assertEqual(l_max, 8)
        self.assertLessEqual(m_max, 8)
        self.assertLess(result.energy_reduced, 0.0)

    def test_02_cap_reached(self):
        """Hitting the cap raises with the energies at cap/2 and at the cap."""
        cfg = self.solver(8, adaptive_truncation=True, energy_rel_tol=1e-14)
        with self.assertRaises(ConvergenceError) as ctx:
            converge(Geometry(0.1), self.conductor, cfg)
        self.assertEqual(len(ctx.exception.partials), 2)

    def test_03_needs_adaptive(self):
        """A fixed truncation has nothing to converge."""
        with self.assertRaises(ConfigError):
            converge(Geometry(1.0), self.conductor, self.solver(8))

    def test_04_rungs_reported(self):
        """Every rung is reported in order."""
        rungs = []
        cfg = self.solver(64, adaptive_truncation=True, energy_rel_tol=1e-8)
        converge(
            Geometry(1.0), self.conductor, cfg, on_rung=lambda lmax, e, m: rungs.append(lmax)
        )
        self.assertEqual(rungs[0], 8)
        self.assertStrictlyIncreasing(rungs)

    def test_05_lenient_point(self):
        """Non-strict points keep the capped result and say so."""
        cfg = self.solver(8, adaptive_truncation=True, energy_rel_tol=1e-14)
        with self.assertLogs("sphereplate.spectral", level="WARNING"):
            point = energy_and_force(Geometry(0.1), self.conductor, cfg, strict=False)
        self.assertFalse(point.converged)
        self.assertEqual(point.l_max_used, 8)
        with self.assertRaises(ConvergenceError):
            energy_and_force(Geometry(0.1), self.conductor, cfg, strict=True)

    def test_06_cap_off_the_ladder(self):
        """A cap of 12 is compared with l_max = 6, not with the rung at 8."""
        cfg = self.solver(12, adaptive_truncation=True, energy_rel_tol=1e-14)
        geom = Geometry(0.1)
        rungs = []
        with self.assertRaises(ConvergenceError) as ctx:
            converge(geom, self.conductor, cfg, on_rung=lambda lmax, e, m: rungs.append(lmax))
        self.assertListEqual(rungs, [8, 12])
        half, _ = truncated_energy(geom, self.conductor, cfg.truncated(6))
        capped, _ = truncated_energy(geom, self.conductor, cfg.truncated(12))
        self.assertEqual(ctx.exception.partials, (half.energy_reduced, capped.energy_reduced))


class ForceTests(SpherePlateTests):
    """Force from the eigenvalue slopes and from finite differences."""

    def test_01_methods_agree(self):
        """Hellmann-Feynman and central differences agree from z/a = 0.1 to 100."""
        for z in np.geomspace(0.1, 100.0, 7):
            z = float(z)
            cfg = self.solver(12, force_method=ForceMethod.BOTH)
            result = casimir_force(Geometry(z), self.conductor, cfg)
            self._display(f"force at z/a={z}", result)
            self.assertLess(result.hf_fd_discrepancy, 1e-6)
            self.assertLess(result.force_reduced, 0.0)

    def test_02_single_methods(self):
        """Each method alone returns its own label."""
        geom = Geometry(1.0)
        hf = casimir_force(geom, self.conductor, self.solver(8, force_method="hf"))
        fd = casimir_force(geom, self.conductor, self.solver(8, force_method="fd"))
        self.assertIs(hf.method, ForceMethod.HELLMANN_FEYNMAN)
        self.assertIs(fd.method, ForceMethod.FINITE_DIFFERENCE)
        self.assertIsNone(hf.hf_fd_discrepancy)
        self.assertRelClose(fd.force_reduced, hf.force_reduced, 1e-6)

    def test_03_step_too_large(self):
        """A step of the whole gap would cross the plate."""
        cfg = self.solver(4, force_method="fd", fd_step_rel=1.0)
        with self.assertRaises(ConfigError):
            casimir_force(Geometry(1.0), self.conductor, cfg)

    def test_04_needs_vectors(self):
        """Slopes need eigenvectors."""
        geom = Geometry(1.0)
        spectrum = solve_spectrum(geom, self.conductor, self.solver(4))
        with self.assertRaises(ConfigError):
            hellmann_feynman_force(spectrum, geom, self.conductor)
        solved = solve_spectrum(geom, self.conductor, self.solver(4), vectors=True)
        with self.assertRaises(ConfigError):
            hellmann_feynman_force(solved, Geometry(2.0), self.conductor)

    def test_05_sweep_point(self):
        """A sweep point carries energy, force and the truncation used."""
        point = energy_and_force(Geometry(3.0), self.conductor, self.solver(10))
        self.assertEqual(point.l_max_used, 10)
        self.assertTrue(point.converged)
        self.assertLess(point.energy.energy_reduced, 0.0)
        self.assertLess(point.force.force_reduced, 0.0)


class GreenFunctionTests(SpherePlateTests):
    """Spectral Green's function of one block."""

    def setUp(self):
        """Solve one block with eigenvectors."""
        self.geom = Geometry(0.5)
        spectrum = solve_spectrum(self.geom, self.conductor, self.solver(4), vectors=True)
        self.block = spectrum.block(0)

    def test_01_far_limit(self):
        """G_ii(u) tends to 1/u for large u."""
        for i in range(4):
            self.assertRelClose(green_function_element(self.block, 1e4, i, i) * 1e4, 1.0, 1e-3)

    def test_02_resolvent(self):
        """The full Green's function inverts u - H."""
        entries = build_block(self.geom, self.conductor, 0, 4).entries
        u = 0.9
        product = green_function(self.block, u) @ (u * np.eye(4) - entries)
        np.testing.assert_allclose(product, np.eye(4), atol=1e-10)
        self.assertAlmostEqual(
            green_function_element(self.block, u, 1, 2), green_function(self.block, u)[1, 2]
        )

    def test_03_pole_structure(self):
        """G_00 runs from +inf to -inf between neighbouring poles."""
        values = self.block.eigenvalues
        for low, high in zip(values, values[1:]):
            self.assertGreater(green_function_element(self.block, low + 1e-9, 0, 0), 0.0)
            self.assertLess(green_function_element(self.block, high - 1e-9, 0, 0), 0.0)

    def test_04_pole_proximity(self):
        """Evaluating on a pole is refused."""
        with self.assertRaises(PoleProximityError):
            green_function_element(self.block, float(self.block.eigenvalues[1]), 0, 0)
        with self.assertRaises(PoleProximityError):
            green_function(self.block, float(self.block.eigenvalues[0]))

    def test_05_needs_vectors(self):
        """Eigenvalues alone are not enough."""
        spectrum = solve_spectrum(self.geom, self.conductor, self.solver(4))
        with self.assertRaises(ConfigError):
            green_function_element(spectrum.block(0), 0.9, 0, 0)


class ExponentTests(SpherePlateTests):
    """Local power-law exponent."""

    def test_01_power_law(self):
        """A pure power law has a constant exponent."""
        zs = np.geomspace(1.0, 100.0, 7)
        sweep = [(float(z), -3.0 * float(z) ** -4) for z in zs]
        betas = local_exponent(sweep)
        self.assertEqual(len(betas), 5)
        self.assertEqual(betas[0][0], sweep[1][0])
        for _, beta in betas:
            self.assertAlmostEqual(beta, 4.0, places=10)
        self.assertAlmostEqual(fit_power_law(zs, 2.0 * zs**-3), -3.0, places=10)

    def test_02_sign_change(self):
        """Mixed signs have no logarithm."""
        with self.assertRaises(SignChangeError):
            local_exponent([(1.0, -1.0), (2.0, 0.5), (3.0, -0.1)])
        with self.assertRaises(SignChangeError):
            local_exponent([(1.0, -1.0), (2.0, 0.0), (3.0, -0.1)])

    def test_03_bad_grids(self):
        """Short or unordered sweeps are configuration errors."""
        with self.assertRaises(ConfigError):
            local_exponent([(1.0, -1.0), (2.0, -0.5)])
        with self.assertRaises(ConfigError):
            local_exponent([(1.0, -1.0), (3.0, -0.5), (2.0, -0.1)])
        with self.assertRaises(ConfigError):
            fit_power_law([1.0], [1.0])


if __name__ == "__main__":
    unittest.main()
