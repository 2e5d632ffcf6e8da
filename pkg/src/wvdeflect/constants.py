"""Fundamental constants (SI, CODATA 2018)."""

HBAR = 1.054571817e-34  # J s, reduced Planck constant
C_LIGHT = 299792458.0  # m/s, vacuum speed of light (exact)
EPSILON_0 = 8.8541878128e-12  # F/m, vacuum permittivity
