"""Effective two-level Hamiltonian of the laser-driven chromophore pair.

Two excited electronic states |H> and |B> sit far above the ground state
and are driven by a pair of Gaussian laser pulses.  After eliminating the
ground and doubly-excited sectors (second-order canonical transformation,
valid while kappa(t)*alpha and kappa(t)*beta stay small) the excited
doublet evolves under

    H0(t) = (eps(t)/2) sigma_z + (delta(t)/2) sigma_x

in the {|H>, |B>} basis, with

    eps(t)   = (epsH - epsB) + kappa(t)^2 (alpha - beta)
    delta(t) = 2 J0         + kappa(t)^2 (alpha + beta)

and pulse envelope kappa(t) = kappa0 (exp(-Gamma1 (t+t1)^2) + exp(-Gamma2 t^2)).
Optical carrier frequencies are dropped: only envelopes drive the doublet
(carriers oscillate ~10^15 Hz, unresolvable at multi-fs steps, and the
envelope treatment is what keeps eps/delta smooth).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .units import RAD_PER_FS_PER_WAVENUMBER

# SI constants for the drive-strength estimate.
_C_M_PER_S = 2.99792458e8
_EPS0_F_PER_M = 8.8541878128e-12
_H_J_S = 6.62607015e-34
_HC_J_CM = _H_J_S * 2.99792458e10
_DEBYE_C_M = 3.33564e-30


@dataclass(frozen=True)
class BareParameters:
    """Bare energies (cm^-1) and pulse parameters of the four-level model."""

    eps0: float
    epsH: float
    epsB: float
    J0: float
    kappa0: float
    Gamma1: float  # fs^-2
    Gamma2: float  # fs^-2
    t1: float  # fs, first pulse centered at t = -t1
    epsHB: float = 0.0  # doubly-excited level; inert for the reduced dynamics

    def __post_init__(self) -> None:
        if not self.epsH > self.eps0:
            raise ValueError("epsH must lie above eps0")
        if not self.epsB > self.eps0:
            raise ValueError("epsB must lie above eps0")
        if not (self.Gamma1 > 0.0 and self.Gamma2 > 0.0):
            raise ValueError("pulse decay constants Gamma1, Gamma2 must be positive")


def kappa(params: BareParameters, t: float) -> float:
    """Pulse envelope kappa(t) = kappa0 (e^{-Gamma1 (t+t1)^2} + e^{-Gamma2 t^2})."""
    g1 = math.exp(-params.Gamma1 * (t + params.t1) ** 2)
    g2 = math.exp(-params.Gamma2 * t * t)
    return params.kappa0 * (g1 + g2)


def _kappa_max(params: BareParameters) -> float:
    # Envelope max lies between the pulse centers; dense scan is plenty.
    lo = -params.t1 - 5.0 / math.sqrt(params.Gamma1)
    hi = 5.0 / math.sqrt(params.Gamma2)
    ts = np.linspace(lo, hi, 4001)
    vals = params.kappa0 * (
        np.exp(-params.Gamma1 * (ts + params.t1) ** 2) + np.exp(-params.Gamma2 * ts**2)
    )
    return float(vals.max())


@dataclass(frozen=True)
class EffectiveDrive:
    """Canonical-transformation coefficients and small-parameter diagnostic."""

    alpha: float  # 1/cm^-1
    beta: float  # 1/cm^-1
    Omega: float  # cm^-2
    small_parameter: float  # max_t kappa(t) * max(alpha, beta)


def effective_drive(params: BareParameters) -> EffectiveDrive:
    """Coefficients alpha, beta, Omega of the second-order elimination.

    Omega = (epsH - eps0)(epsB - eps0) - J0^2,
    alpha = (epsB - eps0 - J0) / Omega, beta = (epsH - eps0 - J0) / Omega.
    Raises ValueError when Omega vanishes (singular transformation); warns
    when the perturbative small parameter exceeds 0.5.
    """
    omega = (params.epsH - params.eps0) * (params.epsB - params.eps0) - params.J0**2
    if omega == 0.0:
        raise ValueError("singular transformation: Omega = 0")
    alpha = (params.epsB - params.eps0 - params.J0) / omega
    beta = (params.epsH - params.eps0 - params.J0) / omega
    small = _kappa_max(params) * max(abs(alpha), abs(beta))
    if small > 0.5:
        warnings.warn(
            f"perturbative small parameter kappa*max(alpha,beta) = {small:.3f} > 0.5; "
            "the effective two-level reduction is unreliable",
            stacklevel=2,
        )
    return EffectiveDrive(alpha=alpha, beta=beta, Omega=omega, small_parameter=small)


@dataclass(frozen=True)
class SystemHamiltonian:
    """Time-dependent fields eps(t), delta(t) of the driven doublet."""

    eps_of_t: Callable[[float], float]
    delta_of_t: Callable[[float], float]
    drive: EffectiveDrive | None = field(default=None, compare=False)

    @classmethod
    def from_bare(cls, params: BareParameters) -> "SystemHamiltonian":
        drv = effective_drive(params)
        splitting = params.epsH - params.epsB
        a_minus_b = drv.alpha - drv.beta
        a_plus_b = drv.alpha + drv.beta
        two_j0 = 2.0 * params.J0

        def eps_of_t(t: float) -> float:
            return splitting + kappa(params, t) ** 2 * a_minus_b

        def delta_of_t(t: float) -> float:
            return two_j0 + kappa(params, t) ** 2 * a_plus_b

        return cls(eps_of_t=eps_of_t, delta_of_t=delta_of_t, drive=drv)

    @classmethod
    def constant(cls, eps: float, delta: float) -> "SystemHamiltonian":
        return cls(eps_of_t=lambda t: eps, delta_of_t=lambda t: delta)


def hamiltonian_matrix(sys: SystemHamiltonian, t: float) -> np.ndarray:
    """2x2 Hermitian matrix (cm^-1) in the {|H>, |B>} basis at time t."""
    e = sys.eps_of_t(t)
    d = sys.delta_of_t(t)
    return np.array([[0.5 * e, 0.5 * d], [0.5 * d, -0.5 * e]], dtype=complex)


def step_propagator(sys: SystemHamiltonian, t_start: float, dt: float) -> np.ndarray:
    """Unitary exp(-i H0(t_mid) dt) with the midpoint rule, H0 in cm^-1.

    Closed form for a traceless real 2x2 Hamiltonian: with
    E = sqrt(eps^2 + delta^2) and phi = E * u * dt / 2,
    U = cos(phi) I - i sin(phi) (delta sigma_x + eps sigma_z)/E.
    """
    if not dt > 0.0:
        raise ValueError("dt must be positive")
    tm = t_start + 0.5 * dt
    e = sys.eps_of_t(tm)
    d = sys.delta_of_t(tm)
    energy = math.hypot(e, d)
    if energy == 0.0:
        return np.eye(2, dtype=complex)
    phi = 0.5 * energy * RAD_PER_FS_PER_WAVENUMBER * dt
    c = math.cos(phi)
    s = math.sin(phi) / energy
    return np.array(
        [[c - 1j * s * e, -1j * s * d], [-1j * s * d, c + 1j * s * e]], dtype=complex
    )


@dataclass(frozen=True)
class DriveEstimate:
    """Breakdown of the peak dipole-field coupling estimate."""

    kappa0_wavenumber: float
    mu_debye: float
    d_h_debye2: float
    d_b_debye2: float
    e0_v_per_cm: float
    e_rms_v_per_cm: float
    intensity_w_per_cm2: float


def estimate_drive_strength(
    n: float,
    eps_ratio: float,
    delta_ratio: float,
    D_B: float,
    lambda_H: float,
    lambda_B: float,
    power: float,
    duration: float,
) -> DriveEstimate:
    """Peak coupling kappa0 = mu * E0 from measured absorption-band data.

    Dipole strengths scale as D ~ n * eps_max * delta / lambda, so with
    D_B given (debye^2), D_H = D_B * eps_ratio * delta_ratio * lambda_B
    / lambda_H (the refractive index cancels in the ratio; the argument
    is kept so callers can state the medium they measured in).  mu is the
    rms of the two band dipoles.  The field amplitude comes from the pulse
    fluence: intensity I = power / duration, root-mean field
    E_rm = sqrt(2 I / (c eps0)), peak amplitude E0 = sqrt(2) E_rm.

    power >= 0 (zero fluence gives kappa0 = 0); all other inputs must be
    positive.
    """
    for name, value in (
        ("n", n),
        ("eps_ratio", eps_ratio),
        ("delta_ratio", delta_ratio),
        ("D_B", D_B),
        ("lambda_H", lambda_H),
        ("lambda_B", lambda_B),
        ("duration", duration),
    ):
        if not value > 0.0:
            raise ValueError(f"{name} must be positive, got {value}")
    if power < 0.0:
        raise ValueError(f"power must be non-negative, got {power}")

    d_h = D_B * eps_ratio * delta_ratio * (lambda_B / lambda_H)
    mu_debye = math.sqrt(0.5 * (D_B + d_h))

    # power J/cm^2 over duration fs -> intensity W/cm^2 -> W/m^2.
    intensity_w_cm2 = power / (duration * 1e-15)
    intensity_w_m2 = intensity_w_cm2 * 1e4
    e_rms_v_m = math.sqrt(2.0 * intensity_w_m2 / (_C_M_PER_S * _EPS0_F_PER_M))
    e0_v_m = math.sqrt(2.0) * e_rms_v_m

    mu_c_m = mu_debye * _DEBYE_C_M
    kappa0 = mu_c_m * e0_v_m / _HC_J_CM  # mu*E0 in J, converted to cm^-1
    return DriveEstimate(
        kappa0_wavenumber=kappa0,
        mu_debye=mu_debye,
        d_h_debye2=d_h,
        d_b_debye2=D_B,
        e0_v_per_cm=e0_v_m / 1e2,
        e_rms_v_per_cm=e_rms_v_m / 1e2,
        intensity_w_per_cm2=intensity_w_cm2,
    )


def estimate_kappa0(
    n: float,
    eps_ratio: float,
    delta_ratio: float,
    D_B: float,
    lambda_H: float,
    lambda_B: float,
    power: float,
    duration: float,
) -> float:
    """kappa0 (cm^-1) from the absorption-band estimate chain."""
    return estimate_drive_strength(
        n, eps_ratio, delta_ratio, D_B, lambda_H, lambda_B, power, duration
    ).kappa0_wavenumber
