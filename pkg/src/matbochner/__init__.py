"""Exact workbench for matrix orthogonal polynomials of conjugated-Hermite weights."""

__version__ = "0.1.0"
