"""Mechanical checks of the triangle criterion for Aut(F_n) and SL(n,Z)."""

__version__ = "0.1.0"
