"""SpherePlate testing module."""
