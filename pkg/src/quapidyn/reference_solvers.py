"""Independent baselines: closed-system integration and the memoryless limit.

unitary_evolution integrates d rho/dt = -i u [H0(t), rho] with an adaptive
RK45 scheme and serves as the oracle for the zero-coupling limit of the
path-sum engine.  markov_propagate is the same engine with the memory
window collapsed to zero (same-slice influence only), isolating bath
memory as the only difference from the full propagation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from .bath import InfluenceKernel
from .driven_system import SystemHamiltonian, hamiltonian_matrix
from .quapi_engine import Trajectory, propagate
from .units import RAD_PER_FS_PER_WAVENUMBER


@dataclass(frozen=True)
class OdeConfig:
    rtol: float = 1e-10
    atol: float = 1e-12
    max_step: float = np.inf  # fs

    def __post_init__(self) -> None:
        if not (self.rtol > 0.0 and self.atol > 0.0):
            raise ValueError("tolerances must be positive")


def unitary_evolution(
    sys: SystemHamiltonian,
    rho0: np.ndarray,
    t_end: float,
    cfg: OdeConfig = OdeConfig(),
    t_eval: np.ndarray | None = None,
) -> Trajectory:
    """Closed-system trajectory over [0, t_end]; samples every 2 fs by default."""
    if not t_end > 0.0:
        raise ValueError("t_end must be positive")
    rho0 = np.asarray(rho0, dtype=complex)
    if t_eval is None:
        t_eval = np.linspace(0.0, t_end, int(round(t_end / 2.0)) + 1)
    u = RAD_PER_FS_PER_WAVENUMBER

    def rhs(t: float, y: np.ndarray) -> np.ndarray:
        rho = y.reshape(2, 2)
        h = hamiltonian_matrix(sys, t)
        return (-1j * u * (h @ rho - rho @ h)).reshape(4)

    sol = solve_ivp(
        rhs,
        (0.0, t_end),
        rho0.reshape(4),
        method="RK45",
        t_eval=t_eval,
        rtol=cfg.rtol,
        atol=cfg.atol,
        max_step=cfg.max_step,
    )
    if not sol.success:
        raise RuntimeError(f"unitary integration failed: {sol.message}")
    rhos = sol.y.T.reshape(-1, 2, 2)
    return Trajectory(times=sol.t, rhos=rhos)


def markov_propagate(
    sys: SystemHamiltonian,
    kernel: InfluenceKernel,
    rho0: np.ndarray,
    dt: float,
    n_steps: int,
) -> Trajectory:
    """Memoryless baseline: the identical engine with dk_max = 0."""
    return propagate(sys, kernel, rho0, dt, n_steps, dk_max=0)
