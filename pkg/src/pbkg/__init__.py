"""Numerical laboratory for a pseudo-bosonic deformation of the Klein-Gordon field."""

__version__ = "0.1.0"
