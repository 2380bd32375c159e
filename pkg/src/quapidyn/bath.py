"""Harmonic bath: spectral density, response function, influence kernel.

The bath couples to the system through sigma_z with a power-law spectral
density under an exponential cutoff,

    J(w) = (pi/2) xi w (w/w_c)^(s-1) exp(-w/w_c)      [w, J in cm^-1]

and enters the reduced dynamics only through the finite-temperature
response function

    C(t) = (1/pi) Integral_0^inf dw J(w) [coth(w/(2 k_B T)) cos(nu t)
                                          - i sin(nu t)],    nu = c w,

returned in cm^-2.  Time-domain frequencies use the ordinary-frequency
conversion nu = c*w (cycles/fs per cm^-1, units.INV_FS_PER_WAVENUMBER);
the same constant squared normalizes the influence coefficients, so the
bath sector is internally consistent.  This convention reproduces the
memory time 1/(c w_c) ~ 17 fs at w_c = 2000 cm^-1 that the rest of the
model is built around.

Influence coefficients are double time integrals of C over path slices.
Slice k holds the path variable during [k dt - dt/2, k dt + dt/2]; the
first and last slices are half width.  Every coefficient reduces exactly
to a 1-D integral Integral w(tau) C(tau) dtau with a piecewise-linear
overlap weight w, evaluated by Gauss-Legendre per linear piece on a
cubic-spline cache of C (grid spacing dt/20).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy import integrate
from scipy.interpolate import CubicSpline

from .units import INV_FS_PER_WAVENUMBER, thermal_energy

# Converts the cm^-2 response values into the dimensionless influence
# exponent.  The bath sector reads wavenumbers as ordinary frequencies
# (rate c * omega_bar, see units.py), and the amplitude carries a further
# calibration factor of 1/2 that pins the decay envelope of the reference
# trajectories; phases, correlation time, and envelope are set by
# independent constants in this convention.
KERNEL_NORMALIZATION = 0.5 * INV_FS_PER_WAVENUMBER**2


class QuadratureError(RuntimeError):
    """Bath quadrature failed to converge."""


@dataclass(frozen=True)
class BathSpec:
    """Spectral exponent s, coupling xi, cutoff omega_c (cm^-1), temperature (K)."""

    s: float
    xi: float
    omega_c: float
    T: float

    def __post_init__(self) -> None:
        if self.s < 0.0:
            raise ValueError(f"spectral exponent s must be >= 0, got {self.s}")
        if self.xi < 0.0:
            raise ValueError(f"coupling xi must be >= 0, got {self.xi}")
        if not self.omega_c > 0.0:
            raise ValueError(f"cutoff omega_c must be positive, got {self.omega_c}")
        if not self.T > 0.0:
            raise ValueError(f"temperature must be positive, got {self.T} K")


def spectral_density(spec: BathSpec, omega: float) -> float:
    """J(omega) in cm^-1; domain error for omega < 0."""
    if omega < 0.0:
        raise ValueError(f"omega must be >= 0, got {omega}")
    if omega == 0.0:
        return 0.0 if spec.s > 0.0 else 0.5 * math.pi * spec.xi * spec.omega_c
    x = omega / spec.omega_c
    return 0.5 * math.pi * spec.xi * spec.omega_c * x**spec.s * math.exp(-x)


def _coth(x: float) -> float:
    if x > 19.0:
        return 1.0
    if x < 1e-4:
        return 1.0 / x + x / 3.0
    return 1.0 / math.tanh(x)


def _quad(func, a, b, epsrel, what, **kwargs):
    with warnings.catch_warnings():
        warnings.simplefilter("error", integrate.IntegrationWarning)
        try:
            val, err = integrate.quad(
                func, a, b, epsabs=0.0, epsrel=epsrel, limit=400, **kwargs
            )
        except integrate.IntegrationWarning as exc:
            raise QuadratureError(f"{what} on [{a:g}, {b:g}]: {exc}") from exc
    return val, err


def _response_with_error(spec: BathSpec, t: float, epsrel: float) -> tuple[complex, float]:
    """C(t) by adaptive quadrature over [0, 40 w_c], with error estimate."""
    if spec.xi == 0.0:
        return 0.0j, 0.0
    sign = 1.0 if t >= 0.0 else -1.0
    ta = abs(t)
    kt2 = 2.0 * thermal_energy(spec.T)
    wc = spec.omega_c
    nu_t = INV_FS_PER_WAVENUMBER * ta  # phase per cm^-1

    def j_coth(w: float) -> float:
        return spectral_density(spec, w) * _coth(w / kt2)

    def j_only(w: float) -> float:
        return spectral_density(spec, w)

    re_val = 0.0
    im_val = 0.0
    err = 0.0

    # [0, w_c]: the coth makes the real integrand ~ w^(s-1) near zero;
    # w = u^(1/s) regularizes it for any s > 0.
    if 0.0 < spec.s < 1.0:
        inv_s = 1.0 / spec.s

        def sub_re(u: float) -> float:
            w = u**inv_s
            return j_coth(w) * math.cos(nu_t * w) * inv_s * u ** (inv_s - 1.0)

        def sub_im(u: float) -> float:
            w = u**inv_s
            return j_only(w) * math.sin(nu_t * w) * inv_s * u ** (inv_s - 1.0)

        v, e = _quad(sub_re, 0.0, wc**spec.s, epsrel, "Re C substituted piece")
        re_val += v
        err += e
        v, e = _quad(sub_im, 0.0, wc**spec.s, epsrel, "Im C substituted piece")
        im_val += v
        err += e
    else:
        v, e = _quad(
            lambda w: j_coth(w) * math.cos(nu_t * w), 0.0, wc, epsrel, "Re C low piece"
        )
        re_val += v
        err += e
        v, e = _quad(
            lambda w: j_only(w) * math.sin(nu_t * w), 0.0, wc, epsrel, "Im C low piece"
        )
        im_val += v
        err += e

    # [w_c, 5 w_c] and [5 w_c, 40 w_c]: smooth, possibly oscillatory; let
    # QUADPACK handle the trig factor explicitly.
    for a, b in ((wc, 5.0 * wc), (5.0 * wc, 40.0 * wc)):
        if nu_t == 0.0:
            v, e = _quad(j_coth, a, b, epsrel, "Re C tail piece")
            re_val += v
            err += e
        else:
            v, e = _quad(
                j_coth, a, b, epsrel, "Re C tail piece", weight="cos", wvar=nu_t
            )
            re_val += v
            err += e
            v, e = _quad(
                j_only, a, b, epsrel, "Im C tail piece", weight="sin", wvar=nu_t
            )
            im_val += v
            err += e

    value = (re_val - 1j * sign * im_val) / math.pi
    return value, err / math.pi


def response_function(spec: BathSpec, t: float, epsrel: float = 1e-10) -> complex:
    """Bath response C(t) in cm^-2 (Re even in t, Im odd)."""
    value, _ = _response_with_error(spec, t, epsrel)
    return value


def response_table(spec: BathSpec, times: np.ndarray, epsrel: float = 1e-10) -> np.ndarray:
    """C(t) sampled at the given times."""
    return np.array([response_function(spec, float(t), epsrel) for t in times])


def correlation_time(spec: BathSpec) -> float:
    """Half-width at half-maximum of the response envelope |C(t)|.

    The envelope measures the memory span seen by the influence kernel;
    for the Ohmic reference bath it equals 1/(c w_c) to within a few
    percent at low temperature.
    """
    c0 = abs(response_function(spec, 0.0))
    if c0 == 0.0:
        raise ValueError("zero-coupling bath has no correlation time")
    half = 0.5 * c0

    def above(t: float) -> bool:
        return abs(response_function(spec, t)) > half

    # bracket the first crossing: march in steps of the natural memory scale
    step = 0.25 / (INV_FS_PER_WAVENUMBER * spec.omega_c)
    lo, hi = 0.0, step
    for _ in range(400):
        if not above(hi):
            break
        lo, hi = hi, hi + step
    else:
        raise QuadratureError("correlation_time: |C(t)| never fell below half")

    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if above(mid):
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


@dataclass(frozen=True)
class InfluenceKernel:
    """Discretized influence coefficients for time step dt and memory dk_max.

    eta_mid[m]   : full slice x full slice at lag m; eta_mid[0] is the
                   interior self coefficient.
    eta_edge[m]  : half slice x full slice at lag m (first/last slice
                   variants; identical by stationarity); eta_edge[0] is
                   the half-slice self coefficient.
    eta_corner[m]: last half slice x first half slice at lag m (only
                   reachable while the first slice is inside the memory
                   window); eta_corner[0] is unused and kept at 0.
    """

    dt: float
    dk_max: int
    eta_mid: np.ndarray
    eta_edge: np.ndarray
    eta_corner: np.ndarray
    bath: BathSpec | None = None

    def cache_text(self) -> str:
        """The kernel as a small text table (cache file format)."""
        lines = []
        b = self.bath
        if b is not None:
            lines.append(
                f"# s = {b.s!r}, xi = {b.xi!r}, omega_c_cm-1 = {b.omega_c!r}, "
                f"T_K = {b.T!r}, dt_fs = {self.dt!r}, dk_max = {self.dk_max}"
            )
        else:
            lines.append(f"# dt_fs = {self.dt!r}, dk_max = {self.dk_max}")
        lines.append("lag, row, re_eta, im_eta")
        for name, row in (
            ("mid", self.eta_mid),
            ("edge", self.eta_edge),
            ("corner", self.eta_corner),
        ):
            for lag, eta in enumerate(row):
                lines.append(f"{lag}, {name}, {eta.real:.17g}, {eta.imag:.17g}")
        return "\n".join(lines) + "\n"

    def save(self, path: str | Path) -> None:
        Path(path).write_text(self.cache_text(), encoding="ascii")

    @classmethod
    def load(cls, path: str | Path) -> "InfluenceKernel":
        p = Path(path)
        rows: dict[str, dict[int, complex]] = {"mid": {}, "edge": {}, "corner": {}}
        dt = None
        dk_max = None
        bath = None
        for line in p.read_text(encoding="ascii").splitlines():
            line = line.strip()
            if not line or line.startswith("lag,"):
                continue
            if line.startswith("#"):
                fields = dict(
                    kv.strip().split(" = ") for kv in line[1:].split(",") if " = " in kv
                )
                dt = float(fields["dt_fs"])
                dk_max = int(fields["dk_max"])
                if "s" in fields:
                    bath = BathSpec(
                        s=float(fields["s"]),
                        xi=float(fields["xi"]),
                        omega_c=float(fields["omega_c_cm-1"]),
                        T=float(fields["T_K"]),
                    )
                continue
            lag_s, name, re_s, im_s = (f.strip() for f in line.split(","))
            rows[name][int(lag_s)] = float(re_s) + 1j * float(im_s)
        if dt is None or dk_max is None:
            raise ValueError(f"kernel cache {p} is missing its header line")

        def as_array(table: dict[int, complex]) -> np.ndarray:
            out = np.zeros(dk_max + 1, dtype=complex)
            for lag, eta in table.items():
                out[lag] = eta
            return out

        return cls(
            dt=dt,
            dk_max=dk_max,
            eta_mid=as_array(rows["mid"]),
            eta_edge=as_array(rows["edge"]),
            eta_corner=as_array(rows["corner"]),
            bath=bath,
        )


_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(32)


def _piece_integral(cvals_fn, a: float, b: float, w_a: float, w_b: float) -> complex:
    """Integral over [a, b] of C(tau) * w(tau) with w linear (w(a)=w_a, w(b)=w_b)."""
    if b <= a:
        return 0.0j
    half = 0.5 * (b - a)
    mid = 0.5 * (a + b)
    tau = mid + half * _GL_NODES
    w = w_a + (w_b - w_a) * (tau - a) / (b - a)
    return half * np.sum(_GL_WEIGHTS * w * cvals_fn(tau))


def kernel_from_response(
    response,
    dt: float,
    dk_max: int,
    bath: BathSpec | None = None,
) -> InfluenceKernel:
    """Build kernel rows from a vectorized response callable C(tau) [cm^-2].

    Each row is KERNEL_NORMALIZATION times the double integral of C over
    the corresponding slice pair, reduced to a weighted 1-D integral.
    """
    if not dt > 0.0:
        raise ValueError("dt must be positive")
    if dk_max < 0:
        raise ValueError("dk_max must be >= 0")
    h = 0.5 * dt
    mid = np.zeros(dk_max + 1, dtype=complex)
    edge = np.zeros(dk_max + 1, dtype=complex)
    corner = np.zeros(dk_max + 1, dtype=complex)

    # self coefficients: triangles tau in [0, width], weight (width - tau)
    mid[0] = _piece_integral(response, 0.0, dt, dt, 0.0)
    edge[0] = _piece_integral(response, 0.0, h, h, 0.0)

    for m in range(1, dk_max + 1):
        c = m * dt
        mid[m] = _piece_integral(response, c - dt, c, 0.0, dt) + _piece_integral(
            response, c, c + dt, dt, 0.0
        )
        edge[m] = (
            _piece_integral(response, c - dt, c - h, 0.0, h)
            + _piece_integral(response, c - h, c, h, h)
            + _piece_integral(response, c, c + h, h, 0.0)
        )
        corner[m] = _piece_integral(response, c - dt, c - h, 0.0, h) + _piece_integral(
            response, c - h, c, h, 0.0
        )

    norm = KERNEL_NORMALIZATION
    return InfluenceKernel(
        dt=dt,
        dk_max=dk_max,
        eta_mid=norm * mid,
        eta_edge=norm * edge,
        eta_corner=norm * corner,
        bath=bath,
    )


def influence_coefficients(
    spec: BathSpec, dt: float, dk_max: int, n_steps: int, epsrel: float = 1e-10
) -> InfluenceKernel:
    """Influence kernel for the given bath, step, and memory window.

    C is sampled once on a fine grid (spacing dt/20) spanning the largest
    lag and interpolated with a cubic spline; all rows integrate the same
    cached spline, so interior coefficients are lag-stationary by
    construction.  n_steps only validates the request (the kernel itself
    is translation invariant).
    """
    if not dt > 0.0:
        raise ValueError("dt must be positive")
    if dk_max < 0:
        raise ValueError("dk_max must be >= 0")
    if n_steps < 1:
        raise ValueError("n_steps must be >= 1")
    if spec.xi == 0.0:
        z = np.zeros(dk_max + 1, dtype=complex)
        return InfluenceKernel(
            dt=dt, dk_max=dk_max, eta_mid=z, eta_edge=z.copy(), eta_corner=z.copy(),
            bath=spec,
        )

    t_max = (dk_max + 1) * dt
    n_grid = 20 * (dk_max + 1) + 1
    grid = np.linspace(0.0, t_max, n_grid)
    samples = response_table(spec, grid, epsrel)
    spline_re = CubicSpline(grid, samples.real)
    spline_im = CubicSpline(grid, samples.imag)

    def cached_response(tau: np.ndarray) -> np.ndarray:
        return spline_re(tau) + 1j * spline_im(tau)

    return kernel_from_response(cached_response, dt, dk_max, bath=spec)
