"""Exact cohomology of the M_l supersymmetric lattice-fermion chains."""

__version__ = "0.1.0"
