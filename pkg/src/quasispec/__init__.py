"""Spectral computations for quasiperiodic operators via periodic and superspace approximations."""

__version__ = "0.1.0"
