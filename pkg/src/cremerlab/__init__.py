"""Validated-numerics laboratory for finite-orbit maps built on Cremer rotations."""

__version__ = "0.1.0"
