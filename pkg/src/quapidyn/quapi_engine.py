"""Memory-windowed path-sum propagation of the reduced density matrix.

The reduced dynamics is a sum over forward/backward sigma_z paths.  Each
time slice k contributes a Liouville index a_k = 2i+j encoding the
forward/backward eigenvalue pair (s+, s-) = (sval[i], sval[j]) with
sval = (+1, -1) for (|H>, |B>).  The bath weighs every ordered slice
pair (k newer, k' older) within the memory window dk_max by

    exp(-(s+_k - s-_k) (eta_{kk'} s+_{k'} - conj(eta_{kk'}) s-_{k'}))

with coefficients from bath.InfluenceKernel.  The propagation keeps an
augmented tensor over the last dk_max slice indices: each step extends
it with the newest slice (free propagator times interior influence
rows) and contracts out the oldest.  Readout at every step runs the
separate termination contraction that re-weights the newest slice with
the half-width end-slice rows, so each reported rho(t_k) is exactly the
discretized path sum for a trajectory ending at t_k.
"""

from __future__ import annotations

import string
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .bath import InfluenceKernel
from .driven_system import SystemHamiltonian, step_propagator

_SVAL = np.array([1.0, -1.0])
_SP = np.repeat(_SVAL, 2)  # forward eigenvalue by Liouville index
_SM = np.tile(_SVAL, 2)  # backward eigenvalue by Liouville index
_AXES = string.ascii_lowercase


class KernelMismatchError(ValueError):
    """Kernel was built for different (dt, dk_max) than the propagation."""


class NumericalBlowupError(RuntimeError):
    """Non-finite tensor entries during propagation."""


def initial_state() -> np.ndarray:
    """Projector onto (|H> + |B>)/sqrt(2): all four entries 1/2."""
    return np.full((2, 2), 0.5, dtype=complex)


@dataclass(frozen=True)
class Trajectory:
    """Reduced-density samples rho(t_k) on a uniform time grid."""

    times: np.ndarray  # fs, strictly increasing, starts at 0
    rhos: np.ndarray  # shape (n, 2, 2), complex

    def __post_init__(self) -> None:
        if len(self.times) != len(self.rhos):
            raise ValueError("times and rhos must have equal length")
        if len(self.times) == 0:
            raise ValueError("trajectory must not be empty")
        if np.any(np.diff(self.times) <= 0.0):
            raise ValueError("times must be strictly increasing")

    @property
    def rho_hh(self) -> np.ndarray:
        return self.rhos[:, 0, 0].real

    @property
    def rho_bb(self) -> np.ndarray:
        return self.rhos[:, 1, 1].real

    @property
    def re_rho_hb(self) -> np.ndarray:
        return self.rhos[:, 0, 1].real

    @property
    def im_rho_hb(self) -> np.ndarray:
        return self.rhos[:, 0, 1].imag

    @property
    def abs_rho_hb(self) -> np.ndarray:
        return np.abs(self.rhos[:, 0, 1])


def _self_factor(eta: complex) -> np.ndarray:
    """Same-slice influence weight by Liouville index."""
    diff = _SP - _SM
    return np.exp(-diff * (eta * _SP - np.conj(eta) * _SM))


def _pair_factor(eta: complex) -> np.ndarray:
    """Two-slice influence weight [a_newer, a_older]."""
    diff = _SP - _SM
    older = eta * _SP - np.conj(eta) * _SM
    return np.exp(-np.outer(diff, older))


def _liouville_step(u: np.ndarray) -> np.ndarray:
    """K[a', a] = U[i', i] conj(U[j', j]) as a 4x4 matrix."""
    return np.kron(u, u.conj())


def propagate(
    sys: SystemHamiltonian,
    kernel: InfluenceKernel,
    rho0: np.ndarray,
    dt: float,
    n_steps: int,
    dk_max: int,
) -> Trajectory:
    """Propagate rho0 for n_steps steps of dt with memory window dk_max."""
    if not dt > 0.0:
        raise ValueError("dt must be positive")
    if n_steps < 1:
        raise ValueError("n_steps must be >= 1")
    if dk_max < 0:
        raise ValueError("dk_max must be >= 0")
    if abs(kernel.dt - dt) > 1e-12 * dt:
        raise KernelMismatchError(
            f"kernel built for dt = {kernel.dt} fs, propagation uses {dt} fs"
        )
    lag_needed = min(dk_max, n_steps)
    if kernel.dk_max < lag_needed:
        raise KernelMismatchError(
            f"kernel holds lags up to {kernel.dk_max}, propagation needs {lag_needed}"
        )

    rho0 = np.asarray(rho0, dtype=complex)
    if rho0.shape != (2, 2):
        raise ValueError(f"rho0 must be 2x2, got shape {rho0.shape}")

    self_mid = _self_factor(kernel.eta_mid[0])
    self_half = _self_factor(kernel.eta_edge[0])
    pair_mid = [None] + [_pair_factor(kernel.eta_mid[m]) for m in range(1, lag_needed + 1)]
    pair_edge = [None] + [_pair_factor(kernel.eta_edge[m]) for m in range(1, lag_needed + 1)]
    pair_corner = [None] + [
        _pair_factor(kernel.eta_corner[m]) for m in range(1, lag_needed + 1)
    ]

    rhos = np.empty((n_steps + 1, 2, 2), dtype=complex)
    rhos[0] = rho0

    # augmented tensor over slices (k-1, k-2, ...), newest axis first;
    # slice 0 enters with its half-width self weight
    tensor = rho0.reshape(4) * self_half

    for k in range(1, n_steps + 1):
        u = step_propagator(sys, (k - 1) * dt, dt)
        step_matrix = _liouville_step(u)
        n_axes = tensor.ndim
        n_pairs = min(dk_max, k)

        # termination: end the path at slice k with half-width rows
        operands = [step_matrix, tensor]
        subs = ["z" + _AXES[0], _AXES[:n_axes]]
        for m in range(1, n_pairs + 1):
            partner = k - m  # lives on tensor axis m-1
            row = pair_corner[m] if partner == 0 else pair_edge[m]
            operands.append(row)
            subs.append("z" + _AXES[m - 1])
        rho_vec = self_half * np.einsum(",".join(subs) + "->z", *operands)
        if not np.all(np.isfinite(rho_vec)):
            raise NumericalBlowupError(
                f"non-finite reduced density at step {k} (t = {k * dt} fs)"
            )
        rhos[k] = rho_vec.reshape(2, 2)

        # extension: slice k as an interior slice
        keep_from = max(0, k - dk_max + 1) if dk_max > 0 else k
        drop_oldest = (k - n_axes) < keep_from  # oldest held slice is k - n_axes
        operands = [step_matrix, tensor]
        subs = ["z" + _AXES[0], _AXES[:n_axes]]
        for m in range(1, n_pairs + 1):
            partner = k - m
            row = pair_edge[m] if partner == 0 else pair_mid[m]
            operands.append(row)
            subs.append("z" + _AXES[m - 1])
        out = "z" + (_AXES[: n_axes - 1] if drop_oldest else _AXES[:n_axes])
        tensor = np.einsum(",".join(subs) + "->" + out, *operands)
        tensor = tensor * self_mid.reshape((4,) + (1,) * (tensor.ndim - 1))

    times = dt * np.arange(n_steps + 1)
    return Trajectory(times=times, rhos=rhos)


class Peak(NamedTuple):
    time: float
    amplitude: float
    period: float | None  # time since the previous peak; None for the first


def peak_analysis(traj: Trajectory) -> list[Peak]:
    """Local maxima of |rho_HB(t)| with quadratic refinement.

    The t = 0 sample counts as a peak when the curve starts descending
    (the coherence starts at its first maximum).  Periods are successive
    peak-time differences; with fewer than two peaks there are none.
    """
    y = traj.abs_rho_hb
    t = traj.times
    n = len(y)
    found: list[tuple[float, float]] = []
    if n >= 2 and y[0] > y[1]:
        found.append((float(t[0]), float(y[0])))
    for i in range(1, n - 1):
        if y[i] > y[i - 1] and y[i] > y[i + 1]:
            denom = y[i - 1] - 2.0 * y[i] + y[i + 1]
            if denom < 0.0:
                delta = 0.5 * (y[i - 1] - y[i + 1]) / denom
                dt_i = 0.5 * (t[i + 1] - t[i - 1])
                t_peak = t[i] + delta * dt_i
                a_peak = y[i] - 0.25 * (y[i - 1] - y[i + 1]) * delta
            else:
                t_peak, a_peak = t[i], y[i]
            found.append((float(t_peak), float(a_peak)))
    peaks = []
    for idx, (tp, ap) in enumerate(found):
        period = tp - found[idx - 1][0] if idx > 0 else None
        peaks.append(Peak(time=tp, amplitude=ap, period=period))
    return peaks
