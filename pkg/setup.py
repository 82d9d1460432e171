"""SpherePlate Package Setup."""

import setuptools

setuptools.setup()
