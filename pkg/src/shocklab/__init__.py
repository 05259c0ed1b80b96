"""Numerical laboratory for viscous shock profiles and rarefaction waves
of 1-D convex scalar conservation laws under periodic perturbations."""

__version__ = "0.1.0"
