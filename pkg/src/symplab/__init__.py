"""Numerical laboratory for symplectic forms on spaces of embedded tori."""

__version__ = "0.1.0"
