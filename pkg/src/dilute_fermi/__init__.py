"""Numerics for the dilute spin-1/2 Fermi gas: lattice sums, scattering, asymptotics and an exact Fock engine."""

__version__ = "0.1.0"
