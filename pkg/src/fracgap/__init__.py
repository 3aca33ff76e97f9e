"""Eigenvalues and fundamental gaps of fractional Schrodinger operators."""

__version__ = "0.1.0"
