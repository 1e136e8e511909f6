"""Lorentz groups over the reals, bounded rationals and prime fields."""

__version__ = "0.1.0"
