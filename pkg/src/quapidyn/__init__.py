"""Numerically exact decoherence dynamics of a driven two-level system.

The package propagates the reduced density matrix of a laser-driven
two-level system whose population difference couples linearly to a bath
of harmonic oscillators.  The bath is integrated out exactly within a
finite memory window (iterative tensor multiplication over influence
weights); the driving enters through a time-dependent effective
Hamiltonian built from a pulsed envelope.

Modules
-------
units             physical constants and unit conversions
driven_system     effective two-level Hamiltonian and its short-time propagator
bath              spectral density, bath response, discretized influence kernel
quapi_engine      memory-windowed path-sum propagation of the reduced state
reference_solvers closed-system and memoryless baselines
cli               command line runner and preset catalogue
"""

from .bath import (
    BathSpec,
    InfluenceKernel,
    correlation_time,
    influence_coefficients,
    response_function,
    spectral_density,
)
from .driven_system import (
    BareParameters,
    DriveEstimate,
    EffectiveDrive,
    SystemHamiltonian,
    effective_drive,
    estimate_drive_strength,
    estimate_kappa0,
    kappa,
    step_propagator,
)
from .quapi_engine import Trajectory, initial_state, peak_analysis, propagate
from .reference_solvers import markov_propagate, unitary_evolution

__all__ = [
    "BareParameters",
    "BathSpec",
    "DriveEstimate",
    "EffectiveDrive",
    "InfluenceKernel",
    "SystemHamiltonian",
    "Trajectory",
    "correlation_time",
    "effective_drive",
    "estimate_drive_strength",
    "estimate_kappa0",
    "influence_coefficients",
    "initial_state",
    "kappa",
    "markov_propagate",
    "peak_analysis",
    "propagate",
    "response_function",
    "spectral_density",
    "step_propagator",
    "unitary_evolution",
]

__version__ = "0.1.0"
