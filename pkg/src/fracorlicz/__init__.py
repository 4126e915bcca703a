"""Numerical laboratory for fractional Orlicz-Sobolev Hardy and Poincare inequalities."""

__version__ = "0.1.0"
