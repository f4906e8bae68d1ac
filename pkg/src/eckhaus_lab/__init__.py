"""Numerical and symbolic laboratory for diffusive stability at the Eckhaus boundary."""

__version__ = "0.1.0"
