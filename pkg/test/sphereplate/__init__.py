# ruff: noqa: N802
"""Test SpherePlate module."""

import unittest
from os import getenv, makedirs
from os.path import exists, join
from shutil import rmtree

import numpy as np

from sphereplate import Geometry, SolverConfig, SubstrateContrast

SLOW = bool(getenv("SPHEREPLATE_TEST_SLOW"))


class SpherePlateTests(unittest.TestCase):
    """Shared helpers for the solver tests."""

    conductor = SubstrateContrast(-1.0)

    @staticmethod
    def assertFileExists(path, msg=None):
        """Assert if a path exists or not."""
        if not exists(path):
            raise AssertionError(msg or f"{path} does not exist")

    @staticmethod
    def assertFileNotExists(path, msg=None):
        """Assert if a path exists or not."""
        if exists(path):
            raise AssertionError(msg or f"{path} does exist")

    @staticmethod
    def assertType(obj, type_, msg=None):
        """Assert an object is an instance of type."""
        if not isinstance(obj, type_):
            raise AssertionError(msg or f"{obj} is not type {type_}, it is {type(obj)}")

    @staticmethod
    def assertRelClose(got, expected, rel_tol, msg=None):
        """Assert two numbers agree to a relative tolerance."""
        scale = max(abs(expected), np.finfo(float).tiny)
        error = abs(got - expected) / scale
        if error > rel_tol:
            raise AssertionError(
                msg or f"{got!r} != {expected!r} (relative error {error:.3e} > {rel_tol:.1e})"
            )

    @staticmethod
    def assertStrictlyIncreasing(values, msg=None):
        """Assert every value is larger than the one before."""
        values = list(values)
        for before, after in zip(values, values[1:]):
            if not after > before:
                raise AssertionError(msg or f"{values} is not strictly increasing")

    @staticmethod
    def _try_pass(error, func, *args, **kwargs):
        try:
            func(*args, **kwargs)
        except error:
            pass

    @staticmethod
    def _display(header, output, single=True):
        """Display intermediate tables."""
        if getenv("SPHEREPLATE_TEST_OUTPUT_DISPLAY"):
            print(header)
            if single:
                print(output)
            else:
                for name, value in output.items():
                    print(f"~~~~~~~~~~ {name} ~~~~~~~~~~")
                    print(value)
            print("~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~")
            print()

    @staticmethod
    def geometry(z):
        """Shorthand for a geometry at z/a."""
        return Geometry(float(z))

    @staticmethod
    def solver(l_max, **kwargs):
        """Shorthand for a solver configuration."""
        return SolverConfig(l_max=l_max, **kwargs)


class SpherePlateFileTests(SpherePlateTests):
    """Tests that write files into a scratch directory."""

    @classmethod
    def setUpClass(cls):
        """Create the scratch directory."""
        cls.temp = join("test", "temp", cls.__name__)
        cls._try_pass(FileNotFoundError, rmtree, cls.temp)
        cls._try_pass(FileExistsError, makedirs, cls.temp)

    @classmethod
    def tearDownClass(cls):
        """Remove the scratch directory."""
        if not getenv("SPHEREPLATE_TEST_KEEP_TEMP"):
            cls._try_pass(FileNotFoundError, rmtree, cls.temp)
            cls._try_pass(OSError, rmtree, cls.temp)

    def scratch(self, *parts):
        """Path inside the scratch directory."""
        return join(self.temp, *parts)
