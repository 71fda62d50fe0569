"""Exponential sums over cubes: complete sums, Weyl sums, arcs, major-arc
approximations and the sumset-expansion counting experiment."""

__version__ = "0.1.0"
