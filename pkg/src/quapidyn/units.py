"""Physical constants and unit conversions.

Internal unit system: energies as wavenumbers (cm^-1), times in fs,
temperatures in K, with hbar = 1.  The conversion from a wavenumber to
the angular frequency entering e^{-iHt} appears exactly once, here.
"""

from __future__ import annotations

import math

# CODATA speed of light, expressed per cm and per fs.
C_CM_PER_S = 2.99792458e10
C_CM_PER_FS = 2.99792458e-5

# Boltzmann constant as a wavenumber per kelvin.
KB_WAVENUMBER_PER_K = 0.69503480

# One wavenumber as an angular frequency in rad/fs (system propagator phase).
RAD_PER_FS_PER_WAVENUMBER = 2.0 * math.pi * C_CM_PER_FS

# One wavenumber as an ordinary (cycle) frequency in 1/fs.  The bath
# sector is normalized with this constant; see bath.py for the rationale.
INV_FS_PER_WAVENUMBER = C_CM_PER_FS


def wavenumber_to_angular_frequency(x: float) -> float:
    """Convert a wavenumber (cm^-1) to an angular frequency in rad/fs."""
    return RAD_PER_FS_PER_WAVENUMBER * x


def angular_frequency_to_wavenumber(w: float) -> float:
    """Inverse of wavenumber_to_angular_frequency."""
    return w / RAD_PER_FS_PER_WAVENUMBER


def thermal_energy(temperature_k: float) -> float:
    """k_B * T as a wavenumber (cm^-1).

    Raises ValueError for non-positive temperature.
    """
    if not temperature_k > 0.0:
        raise ValueError(f"temperature must be positive, got {temperature_k} K")
    return KB_WAVENUMBER_PER_K * temperature_k
