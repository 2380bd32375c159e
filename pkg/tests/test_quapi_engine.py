"""Windowed path-sum engine against brute-force enumeration, plus invariants."""

import itertools

import numpy as np
import pytest

from quapidyn.bath import BathSpec, InfluenceKernel, influence_coefficients
from quapidyn.driven_system import SystemHamiltonian, step_propagator
from quapidyn.quapi_engine import (
    KernelMismatchError,
    NumericalBlowupError,
    Trajectory,
    initial_state,
    peak_analysis,
    propagate,
)

# forward/backward sigma_z eigenvalues by Liouville index a = 2i + j
_SP = np.array([1.0, 1.0, -1.0, -1.0])
_SM = np.array([1.0, -1.0, 1.0, -1.0])


def _eta_for(kernel: InfluenceKernel, n_steps: int, k: int, kp: int, dk_max: int):
    """Row value for the ordered pair k >= kp, or None outside the window."""
    lag = k - kp
    if lag > dk_max:
        return None
    end_k = k in (0, n_steps)
    end_kp = kp in (0, n_steps)
    if lag == 0:
        return kernel.eta_edge[0] if end_k else kernel.eta_mid[0]
    if end_k and end_kp:
        return kernel.eta_corner[lag]
    if end_k or end_kp:
        return kernel.eta_edge[lag]
    return kernel.eta_mid[lag]


def _brute_force(sys, kernel, rho0, dt, n_steps, dk_max):
    """Sum over all 4^(n_steps+1) forward/backward paths; exact but exponential."""
    props = []
    for k in range(n_steps):
        u = step_propagator(sys, k * dt, dt)
        props.append(np.kron(u, u.conj()))
    rho_vec0 = rho0.reshape(4)
    out = np.zeros(4, dtype=complex)
    for path in itertools.product(range(4), repeat=n_steps + 1):
        amp = rho_vec0[path[0]]
        for k in range(n_steps):
            amp = amp * props[k][path[k + 1], path[k]]
        expo = 0.0 + 0.0j
        for k in range(n_steps + 1):
            for kp in range(k + 1):
                eta = _eta_for(kernel, n_steps, k, kp, dk_max)
                if eta is None:
                    continue
                dsk = _SP[path[k]] - _SM[path[k]]
                expo -= dsk * (eta * _SP[path[kp]] - np.conj(eta) * _SM[path[kp]])
        out[path[n_steps]] += amp * np.exp(expo)
    return out.reshape(2, 2)


@pytest.mark.parametrize(
    "n_steps,dk_max",
    [(1, 1), (2, 2), (3, 3), (4, 4), (5, 5), (3, 1), (4, 2), (5, 3),
     (6, 2), (6, 4), (5, 1), (4, 0)],
)
def test_engine_matches_path_enumeration(ref_sys, ref_kernel6, n_steps, dk_max):
    rho0 = initial_state()
    traj = propagate(ref_sys, ref_kernel6, rho0, 5.0, n_steps, dk_max)
    ref = _brute_force(ref_sys, ref_kernel6, rho0, 5.0, n_steps, dk_max)
    assert np.max(np.abs(traj.rhos[n_steps] - ref)) < 1e-12


def test_intermediate_readout_matches_shorter_run(ref_sys, ref_kernel6):
    # rho(t_k) must be the exact path sum for a run ending at t_k
    rho0 = initial_state()
    long = propagate(ref_sys, ref_kernel6, rho0, 5.0, 12, 3)
    short = propagate(ref_sys, ref_kernel6, rho0, 5.0, 7, 3)
    assert np.array_equal(long.rhos[:8], short.rhos)


def test_window_covering_run_is_window_independent(ref_sys, ref_kernel6):
    rho0 = initial_state()
    a = propagate(ref_sys, ref_kernel6, rho0, 5.0, 4, 4)
    b = propagate(ref_sys, ref_kernel6, rho0, 5.0, 4, 6)
    assert np.array_equal(a.rhos, b.rhos)


def test_determinism_bitwise(ref_sys, ref_kernel6):
    rho0 = initial_state()
    a = propagate(ref_sys, ref_kernel6, rho0, 5.0, 40, 3)
    b = propagate(ref_sys, ref_kernel6, rho0, 5.0, 40, 3)
    assert np.array_equal(a.rhos, b.rhos)


def test_state_invariants_on_reference_run(ref_sys, ref_kernel6):
    traj = propagate(ref_sys, ref_kernel6, initial_state(), 5.0, 120, 3)
    trace_dev = np.max(np.abs(np.trace(traj.rhos, axis1=1, axis2=2) - 1.0))
    herm_dev = np.max(np.abs(traj.rhos - np.conj(np.transpose(traj.rhos, (0, 2, 1)))))
    min_eig = min(np.linalg.eigvalsh(r)[0] for r in traj.rhos)
    assert trace_dev < 1e-12
    assert herm_dev < 1e-12
    assert min_eig >= -1e-12


def test_trace_preservation_at_fine_step(ref_sys, ref_bath):
    kern = influence_coefficients(ref_bath, 1.0, 3, 1)
    traj = propagate(ref_sys, kern, initial_state(), 1.0, 100, 3)
    trace_dev = np.max(np.abs(np.trace(traj.rhos, axis1=1, axis2=2) - 1.0))
    assert trace_dev < 1e-9


def test_initial_state_is_symmetric_projector():
    rho = initial_state()
    assert np.array_equal(rho, np.full((2, 2), 0.5, dtype=complex))
    assert np.allclose(rho @ rho, rho)
    assert np.trace(rho) == 1.0


def test_kernel_mismatch_errors(ref_sys):
    zeros = np.zeros(3, dtype=complex)
    kern = InfluenceKernel(dt=5.0, dk_max=2, eta_mid=zeros,
                           eta_edge=zeros.copy(), eta_corner=zeros.copy())
    rho0 = initial_state()
    with pytest.raises(KernelMismatchError):
        propagate(ref_sys, kern, rho0, 2.5, 4, 2)
    with pytest.raises(KernelMismatchError):
        propagate(ref_sys, kern, rho0, 5.0, 10, 6)
    # a short run never reaches the missing lags, so it is admissible
    traj = propagate(ref_sys, kern, rho0, 5.0, 2, 6)
    assert len(traj.times) == 3


def test_blowup_detection(ref_sys):
    nan_row = np.array([np.nan + 0.0j, 0.0j])
    kern = InfluenceKernel(dt=5.0, dk_max=1, eta_mid=np.zeros(2, dtype=complex),
                           eta_edge=nan_row, eta_corner=np.zeros(2, dtype=complex))
    with pytest.raises(NumericalBlowupError):
        propagate(ref_sys, kern, initial_state(), 5.0, 3, 1)


def test_propagate_argument_validation(ref_sys, ref_kernel6):
    rho0 = initial_state()
    with pytest.raises(ValueError):
        propagate(ref_sys, ref_kernel6, rho0, -5.0, 3, 1)
    with pytest.raises(ValueError):
        propagate(ref_sys, ref_kernel6, rho0, 5.0, 0, 1)
    with pytest.raises(ValueError):
        propagate(ref_sys, ref_kernel6, rho0, 5.0, 3, -1)
    with pytest.raises(ValueError):
        propagate(ref_sys, ref_kernel6, np.eye(3), 5.0, 3, 1)


# ------------------------------------------------------------------ trajectory


def test_trajectory_column_views():
    rho = np.array([[0.7, 0.1 - 0.2j], [0.1 + 0.2j, 0.3]])
    traj = Trajectory(times=np.array([0.0]), rhos=rho[None, :, :])
    assert traj.rho_hh[0] == pytest.approx(0.7)
    assert traj.rho_bb[0] == pytest.approx(0.3)
    assert traj.re_rho_hb[0] == pytest.approx(0.1)
    assert traj.im_rho_hb[0] == pytest.approx(-0.2)
    assert traj.abs_rho_hb[0] == pytest.approx(np.hypot(0.1, 0.2))


def test_trajectory_validation():
    rhos = np.zeros((2, 2, 2), dtype=complex)
    with pytest.raises(ValueError):
        Trajectory(times=np.array([0.0]), rhos=rhos)
    with pytest.raises(ValueError):
        Trajectory(times=np.array([]), rhos=np.zeros((0, 2, 2)))
    with pytest.raises(ValueError):
        Trajectory(times=np.array([0.0, 0.0]), rhos=rhos)


# --------------------------------------------------------------- peak analysis


def _coherence_trajectory(t, y):
    rhos = np.zeros((len(t), 2, 2), dtype=complex)
    rhos[:, 0, 0] = 0.5
    rhos[:, 1, 1] = 0.5
    rhos[:, 0, 1] = y
    rhos[:, 1, 0] = y
    return Trajectory(times=t, rhos=rhos)


def test_peak_analysis_on_grid_cosine():
    t = np.arange(0.0, 301.0, 5.0)
    traj = _coherence_trajectory(t, 0.3 + 0.2 * np.cos(2.0 * np.pi * t / 100.0))
    peaks = peak_analysis(traj)
    assert [round(p.time, 6) for p in peaks] == [0.0, 100.0, 200.0]
    assert peaks[0].period is None
    assert peaks[1].period == pytest.approx(100.0, abs=1e-9)
    assert peaks[2].period == pytest.approx(100.0, abs=1e-9)
    assert peaks[0].amplitude == pytest.approx(0.5, abs=1e-12)
    assert peaks[1].amplitude == pytest.approx(0.5, abs=1e-3)


def test_peak_analysis_refines_off_grid_maxima():
    t = np.arange(0.0, 301.0, 5.0)
    traj = _coherence_trajectory(
        t, 0.3 + 0.2 * np.cos(2.0 * np.pi * (t - 1.7) / 100.0)
    )
    peaks = peak_analysis(traj)
    interior = [p for p in peaks if p.time > 0.0]
    assert len(interior) == 2
    assert interior[0].time == pytest.approx(101.7, abs=0.05)
    assert interior[1].time == pytest.approx(201.7, abs=0.05)
    assert interior[1].period == pytest.approx(100.0, abs=0.02)


def test_peak_analysis_initial_descent_counts_as_peak():
    t = np.array([0.0, 5.0, 10.0])
    traj = _coherence_trajectory(t, np.array([0.5, 0.4, 0.3]))
    peaks = peak_analysis(traj)
    assert len(peaks) == 1
    assert peaks[0].time == 0.0
    assert peaks[0].amplitude == pytest.approx(0.5)
    assert peaks[0].period is None


def test_peak_analysis_finds_nothing_on_flat_or_rising_data():
    t = np.arange(0.0, 50.0, 5.0)
    assert peak_analysis(_coherence_trajectory(t, np.full(len(t), 0.25))) == []
    assert peak_analysis(_coherence_trajectory(t, np.linspace(0.0, 0.4, len(t)))) == []


def test_peak_analysis_single_sample():
    traj = _coherence_trajectory(np.array([0.0]), np.array([0.5]))
    assert peak_analysis(traj) == []
