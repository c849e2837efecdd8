"""Periodic orbits of time-periodic Hamiltonians, their braids and braid entropy."""

__version__ = "0.1.0"
