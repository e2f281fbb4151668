"""Encoding-aware local-search preprocessing for CDCL SAT solvers."""

__version__ = "0.1.0"
