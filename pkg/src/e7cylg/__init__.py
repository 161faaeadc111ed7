"""Exact verification workbench for the genus-zero potentials attached to
W = x^4 + y^4 + z^2, its orbifold mirrors, and Halphen-system solutions."""

__version__ = "0.1.0"
