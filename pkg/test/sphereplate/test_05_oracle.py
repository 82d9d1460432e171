"""Test the slow reference implementations."""

import json
import unittest

import numpy as np

from sphereplate import ConfigError, ConvergenceError, Geometry, OracleReport, SubstrateContrast
from sphereplate import build_block
from sphereplate.oracle import (
    ORACLE_MAX_ORDER,
    brute_force_block,
    first_failure,
    oracle_dipole_energy,
    oracle_eigenvalues,
    power_iteration_extreme_eigenvalue,
    rational_block,
    run_oracle_suite,
)
from sphereplate.spectral import solve_block

from . import SLOW, SpherePlateTests


class OracleBlockTests(SpherePlateTests):
    """Exact blocks against the fast assembly."""

    def test_01_blocks_agree(self):
        """Entries agree to 1e-10 over random separations and substrates."""
        rng = np.random.default_rng(7)
        for _ in range(10):
            geom = Geometry(float(10 ** rng.uniform(-1.3, 1.0)))
            contrast = SubstrateContrast(float(rng.uniform(-1.0, 1.0)))
            for m in range(5):
                exact = brute_force_block(geom, contrast, m, 4)
                fast = build_block(geom, contrast, m, 4).entries
                np.testing.assert_allclose(fast, exact, rtol=1e-10, atol=0.0)

    def test_02_order_limit(self):
        """The exact path is limited to small blocks."""
        with self.assertRaises(ConfigError):
            rational_block(Geometry(1.0), self.conductor, 0, ORACLE_MAX_ORDER + 1)
        with self.assertRaises(ConfigError):
            brute_force_block(Geometry(1.0), self.conductor, 3, 2)

    def test_03_unsymmetrised_spectrum(self):
        """The unsymmetrised block has the same eigenvalues."""
        geom, contrast = Geometry(0.7), SubstrateContrast(-0.6)
        expected = oracle_eigenvalues(geom, contrast, 0, 3)
        got = solve_block(geom, contrast, 0, 3).eigenvalues
        for one, other in zip(expected, got):
            self.assertRelClose(other, one, 1e-10)

    def test_04_quadrupole_blocks(self):
        """l_max = 2 at z/a = 1: the 2x2, 2x2 and 1x1 blocks."""
        geom = Geometry(1.0)
        for m in range(3):
            expected = oracle_eigenvalues(geom, self.conductor, m, 2)
            got = solve_block(geom, self.conductor, m, 2).eigenvalues
            self.assertEqual(len(got), 2 if m < 2 else 1)
            for one, other in zip(expected, got):
                self.assertRelClose(other, one, 1e-12)

    def test_05_dipole_energy(self):
        """50-digit dipole energy matches the closed form."""
        self.assertRelClose(oracle_dipole_energy(Geometry(1.0), self.conductor), -0.0090747, 1e-4)


class PowerIterationTests(SpherePlateTests):
    """Largest eigenvalue by power iteration."""

    def test_01_two_by_two(self):
        """[[2, 1], [1, 2]] has eigenvalues 1 and 3."""
        matrix = np.array([[2.0, 1.0], [1.0, 2.0]])
        self.assertAlmostEqual(power_iteration_extreme_eigenvalue(matrix), 3.0, places=9)

    def test_02_diagonal(self):
        """A diagonal block returns its largest entry."""
        matrix = np.diag([0.1, 0.5, 0.3])
        self.assertAlmostEqual(power_iteration_extreme_eigenvalue(matrix), 0.5, places=9)

    def test_03_negative_spectrum(self):
        """The largest eigenvalue wins even when another is larger in magnitude."""
        matrix = np.diag([-4.0, 1.0])
        self.assertAlmostEqual(power_iteration_extreme_eigenvalue(matrix), 1.0, places=9)

    def test_04_cap(self):
        """Running out of iterations raises with the last estimate."""
        matrix = np.diag([1.0, 1.001])
        with self.assertRaises(ConvergenceError) as ctx:
            power_iteration_extreme_eigenvalue(matrix, max_iterations=1)
        self.assertEqual(len(ctx.exception.partials), 1)

    def test_05_production_blocks(self):
        """Power iteration agrees with the dense eigensolver on full-size blocks."""
        geom = Geometry(1.0)
        for m in (0, 3, 10):
            block = build_block(geom, self.conductor, m, 32).entries
            expected = solve_block(geom, self.conductor, m, 32).eigenvalues[-1]
            self.assertRelClose(power_iteration_extreme_eigenvalue(block), expected, 1e-10)

    def test_06_not_symmetric(self):
        """Only square symmetric matrices are accepted."""
        with self.assertRaises(ConfigError):
            power_iteration_extreme_eigenvalue(np.array([[1.0, 2.0], [0.0, 1.0]]))
        with self.assertRaises(ConfigError):
            power_iteration_extreme_eigenvalue(np.ones((2, 3)))


class ReportTests(SpherePlateTests):
    """Oracle reports and the suite."""

    def test_01_compare(self):
        """Reports carry a consistent verdict."""
        report = OracleReport.compare("case", 2.0, 2.0 + 1e-12, 1e-10)
        self.assertTrue(report.passed)
        self.assertLess(report.rel_error, 1e-10)
        failed = OracleReport.compare("case", 1.0, 1.1, 1e-10)
        self.assertFalse(failed.passed)
        self.assertIs(first_failure([report, failed]), failed)
        self.assertIsNone(first_failure([report]))

    def test_02_inconsistent(self):
        """A verdict that contradicts the error is rejected."""
        with self.assertRaises(ConfigError):
            OracleReport("case", 1.0, 2.0, 1.0, 1e-10, True)

    def test_03_json(self):
        """One JSON object per report."""
        report = OracleReport.compare("json_case", 1.0, 1.0, 1e-12)
        data = json.loads(report.to_json())
        self.assertEqual(data["case_id"], "json_case")
        self.assertTrue(data["passed"])

    def test_04_suite(self):
        """Every exact-block draw passes, with a few power-iteration blocks."""
        reports = run_oracle_suite(draws=20, power_draws=4)
        self.assertEqual(len(reports), 4 + 20 + 4)
        self.assertEqual(sum(r.case_id.startswith("block_l4_") for r in reports), 20)
        failure = first_failure(reports)
        self.assertIsNone(failure, failure.to_json() if failure else None)

    @unittest.skipUnless(SLOW, "set SPHEREPLATE_TEST_SLOW to run the slow checks")
    def test_05_full_suite(self):
        """The default suite checks 50 production blocks by power iteration."""
        reports = run_oracle_suite()
        power = [r for r in reports if r.case_id.startswith("power_iteration_")]
        self.assertEqual(len(power), 50)
        self.assertEqual(len(reports), 4 + 20 + 50)
        failure = first_failure(reports)
        self.assertIsNone(failure, failure.to_json() if failure else None)


if __name__ == "__main__":
    unittest.main()
