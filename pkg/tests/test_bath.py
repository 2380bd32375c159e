"""Spectral density, response function, and the discretized influence kernel."""

import math

import numpy as np
import pytest
from scipy.integrate import dblquad
from scipy.interpolate import CubicSpline

from quapidyn.bath import (
    KERNEL_NORMALIZATION,
    BathSpec,
    InfluenceKernel,
    QuadratureError,
    correlation_time,
    influence_coefficients,
    kernel_from_response,
    response_function,
    response_table,
    spectral_density,
)
from quapidyn.units import INV_FS_PER_WAVENUMBER

# ------------------------------------------------------------ spectral density


def test_spectral_density_reference_value(ref_bath):
    expected = 0.5 * math.pi * 0.75 * 2000.0 * math.exp(-1.0)
    assert spectral_density(ref_bath, 2000.0) == pytest.approx(expected, rel=1e-14)
    assert spectral_density(ref_bath, 2000.0) == pytest.approx(866.7955123, abs=1e-6)


@pytest.mark.parametrize("s", [0.5, 1.0, 2.0])
def test_spectral_density_low_frequency_power_law(s):
    b = BathSpec(s=s, xi=0.4, omega_c=2000.0, T=77.0)
    # far below the cutoff J ~ w^s, so doubling w scales J by 2^s
    ratio = spectral_density(b, 2e-3) / spectral_density(b, 1e-3)
    assert ratio == pytest.approx(2.0**s, rel=1e-5)


def test_spectral_density_edge_cases(ref_bath):
    assert spectral_density(ref_bath, 0.0) == 0.0
    flat = BathSpec(s=0.0, xi=0.4, omega_c=1500.0, T=77.0)
    assert spectral_density(flat, 0.0) == pytest.approx(0.5 * math.pi * 0.4 * 1500.0)
    with pytest.raises(ValueError):
        spectral_density(ref_bath, -1.0)


def test_spectral_density_peaks_at_cutoff_for_ohmic(ref_bath):
    j = spectral_density(ref_bath, 2000.0)
    assert j > spectral_density(ref_bath, 1900.0)
    assert j > spectral_density(ref_bath, 2100.0)


# ----------------------------------------------------------- response function


def test_response_vacuum_closed_form():
    # at T -> 0 the Ohmic response is (xi/2) wc^2 (1 - i x)^2 / (1 + x^2)^2
    # with x = c wc t; at 0.01 K the thermal correction is below 1e-4
    b = BathSpec(s=1.0, xi=0.75, omega_c=2000.0, T=0.01)
    for t in (0.0, 5.0, 10.0, 16.6, 30.0):
        x = INV_FS_PER_WAVENUMBER * b.omega_c * t
        expected = 0.5 * b.xi * b.omega_c**2 * (1.0 - 1j * x) ** 2 / (1.0 + x * x) ** 2
        got = response_function(b, t)
        assert got == pytest.approx(expected, rel=1e-4)


def test_response_conjugate_symmetry(ref_bath):
    for t in (1.0, 7.3, 22.0):
        assert response_function(ref_bath, -t) == response_function(ref_bath, t).conjugate()


def test_response_zero_time_value(ref_bath):
    c0 = response_function(ref_bath, 0.0)
    assert c0.imag == 0.0
    assert c0.real == pytest.approx(1503400.132, abs=1e-2)


def test_response_thermal_enhancement_monotone():
    vals = [
        response_function(BathSpec(1.0, 0.75, 2000.0, T), 0.0).real
        for T in (1.0, 77.0, 300.0)
    ]
    assert vals[0] < vals[1] < vals[2]


def test_response_real_part_half_decay(ref_bath):
    c0 = response_function(ref_bath, 0.0).real
    assert response_function(ref_bath, 7.0).real > 0.5 * c0
    assert response_function(ref_bath, 9.0).real < 0.5 * c0


def test_response_tolerance_refinement(ref_bath):
    loose = response_function(ref_bath, 7.3, epsrel=1e-8)
    tight = response_function(ref_bath, 7.3, epsrel=1e-12)
    assert abs(loose - tight) / abs(tight) < 1e-7


def test_response_table_matches_scalar(ref_bath):
    ts = np.array([0.0, 2.5, 11.0])
    table = response_table(ref_bath, ts)
    for t, v in zip(ts, table):
        assert v == response_function(ref_bath, float(t))


@pytest.mark.parametrize("s,xi", [(0.5, 0.07), (2.0, 50.0)])
def test_response_other_spectral_families(s, xi):
    b = BathSpec(s=s, xi=xi, omega_c=2000.0, T=77.0)
    v = response_function(b, 3.7)
    assert np.isfinite(v)
    assert abs(v) > 0.0
    assert v.imag < 0.0  # sign convention for t > 0


def test_response_zero_coupling():
    b = BathSpec(s=1.0, xi=0.0, omega_c=2000.0, T=77.0)
    assert response_function(b, 4.2) == 0.0
    with pytest.raises(ValueError):
        correlation_time(b)


def test_response_marginal_exponent_is_infrared_divergent():
    # s = 0 with T > 0 makes the thermal integrand ~ 1/w
    with pytest.raises(QuadratureError):
        response_function(BathSpec(s=0.0, xi=0.5, omega_c=2000.0, T=77.0), 3.0)


def test_bath_spec_validation():
    with pytest.raises(ValueError):
        BathSpec(s=-0.1, xi=0.5, omega_c=2000.0, T=77.0)
    with pytest.raises(ValueError):
        BathSpec(s=1.0, xi=-0.5, omega_c=2000.0, T=77.0)
    with pytest.raises(ValueError):
        BathSpec(s=1.0, xi=0.5, omega_c=0.0, T=77.0)
    with pytest.raises(ValueError):
        BathSpec(s=1.0, xi=0.5, omega_c=2000.0, T=0.0)


# ------------------------------------------------------------ correlation time


def test_correlation_time_reference(ref_bath):
    assert correlation_time(ref_bath) == pytest.approx(16.6408, abs=0.02)


def test_correlation_time_cutoff_scaling(ref_bath):
    tau2 = correlation_time(ref_bath)
    tau4 = correlation_time(BathSpec(1.0, 0.75, 4000.0, 77.0))
    assert tau4 == pytest.approx(8.3343, abs=0.02)
    assert tau4 / tau2 == pytest.approx(0.5, abs=0.01)


def test_correlation_time_shrinks_slightly_with_temperature(ref_bath):
    # thermal weight inflates |C(0)| faster than the envelope near the
    # crossing, so the half-width moves in as T rises (a 2.5% effect)
    tau77 = correlation_time(ref_bath)
    tau150 = correlation_time(BathSpec(1.0, 0.75, 2000.0, 150.0))
    tau300 = correlation_time(BathSpec(1.0, 0.75, 2000.0, 300.0))
    assert tau150 == pytest.approx(16.5447, abs=0.02)
    assert tau300 == pytest.approx(16.2256, abs=0.02)
    assert tau77 > tau150 > tau300


# ------------------------------------------------------------- kernel geometry


def test_flat_response_closed_forms():
    c0 = 2.0 + 0.0j
    dt = 2.0
    kern = kernel_from_response(lambda tau: np.full_like(tau, c0, dtype=complex), dt, 3)
    norm = KERNEL_NORMALIZATION * c0
    assert kern.eta_mid[0] == pytest.approx(norm * dt**2 / 2.0, rel=1e-14)
    assert kern.eta_edge[0] == pytest.approx(norm * dt**2 / 8.0, rel=1e-14)
    for m in (1, 2, 3):
        assert kern.eta_mid[m] == pytest.approx(norm * dt**2, rel=1e-14)
        assert kern.eta_edge[m] == pytest.approx(norm * dt**2 / 2.0, rel=1e-14)
        assert kern.eta_corner[m] == pytest.approx(norm * dt**2 / 4.0, rel=1e-14)
    assert kern.eta_corner[0] == 0.0


def test_linear_response_closed_forms():
    a, b = 1.5, -0.25
    dt = 3.0
    h = 0.5 * dt
    kern = kernel_from_response(lambda tau: (a + b * tau).astype(complex), dt, 2)
    norm = KERNEL_NORMALIZATION
    assert kern.eta_mid[0] == pytest.approx(
        norm * (a * dt**2 / 2.0 + b * dt**3 / 6.0), rel=1e-13
    )
    assert kern.eta_edge[0] == pytest.approx(
        norm * (a * h**2 / 2.0 + b * h**3 / 6.0), rel=1e-13
    )
    for m in (1, 2):
        c = m * dt
        # interior tent is symmetric around the lag center; rows touching a
        # half-width end slice have their centroid pulled in by h/2 resp. h
        assert kern.eta_mid[m] == pytest.approx(norm * (a + b * c) * dt**2, rel=1e-13)
        assert kern.eta_edge[m] == pytest.approx(
            norm * ((a + b * c) * dt**2 / 2.0 - b * dt**3 / 8.0), rel=1e-13
        )
        assert kern.eta_corner[m] == pytest.approx(
            norm * ((a + b * c) * dt**2 / 4.0 - b * dt**3 / 8.0), rel=1e-13
        )


def test_kernel_rows_match_double_quadrature(ref_bath):
    # independent route: brute 2-D quadrature of C(tau - tau') over the
    # slice rectangles, against the reduced 1-D forms the kernel uses
    dt, dk = 5.0, 3
    h = 0.5 * dt
    grid = np.linspace(0.0, (dk + 1) * dt, 20 * (dk + 1) + 1)
    samples = response_table(ref_bath, grid)
    sre = CubicSpline(grid, samples.real)
    sim = CubicSpline(grid, samples.imag)

    def resp(tau):
        return sre(tau) + 1j * sim(tau)

    kern = kernel_from_response(resp, dt, dk, bath=ref_bath)

    def square(x_lo, x_hi, y_lo, y_hi):
        re, _ = dblquad(lambda y, x: sre(y - x), x_lo, x_hi, y_lo, y_hi,
                        epsabs=1e-9, epsrel=1e-11)
        im, _ = dblquad(lambda y, x: sim(y - x), x_lo, x_hi, y_lo, y_hi,
                        epsabs=1e-9, epsrel=1e-11)
        return KERNEL_NORMALIZATION * (re + 1j * im)

    # pair (k = 3, k' = 1), both interior
    assert kern.eta_mid[2] == pytest.approx(
        square(dt - h, dt + h, 3 * dt - h, 3 * dt + h), rel=1e-8
    )
    # pair (k = 3, k' = 0), first slice is half width
    assert kern.eta_edge[3] == pytest.approx(
        square(0.0, h, 3 * dt - h, 3 * dt + h), rel=1e-8
    )
    # pair (k = n = 2, k' = 0), both end slices half width
    assert kern.eta_corner[2] == pytest.approx(
        square(0.0, h, 2 * dt - h, 2 * dt), rel=1e-8
    )
    # ordered self pairs tau' <= tau inside one slice
    tri_re, _ = dblquad(lambda y, x: sre(y - x), 0.0, dt, lambda x: x, dt,
                        epsabs=1e-9, epsrel=1e-11)
    tri_im, _ = dblquad(lambda y, x: sim(y - x), 0.0, dt, lambda x: x, dt,
                        epsabs=1e-9, epsrel=1e-11)
    assert kern.eta_mid[0] == pytest.approx(
        KERNEL_NORMALIZATION * (tri_re + 1j * tri_im), rel=1e-8
    )
    tri_re, _ = dblquad(lambda y, x: sre(y - x), 0.0, h, lambda x: x, h,
                        epsabs=1e-10, epsrel=1e-11)
    tri_im, _ = dblquad(lambda y, x: sim(y - x), 0.0, h, lambda x: x, h,
                        epsabs=1e-10, epsrel=1e-11)
    assert kern.eta_edge[0] == pytest.approx(
        KERNEL_NORMALIZATION * (tri_re + 1j * tri_im), rel=1e-8
    )


def test_kernel_rows_are_translation_invariant(ref_bath, ref_kernel6):
    # n_steps is only a validation input, and widening the window must not
    # disturb the shared lags beyond spline end effects
    k_a = influence_coefficients(ref_bath, 5.0, 3, 1)
    k_b = influence_coefficients(ref_bath, 5.0, 3, 999)
    assert np.array_equal(k_a.eta_mid, k_b.eta_mid)
    assert np.array_equal(k_a.eta_edge, k_b.eta_edge)
    assert np.array_equal(k_a.eta_corner, k_b.eta_corner)
    scale = abs(ref_kernel6.eta_mid[0])
    assert np.max(np.abs(k_a.eta_mid - ref_kernel6.eta_mid[:4])) < 1e-10 * scale
    assert np.max(np.abs(k_a.eta_edge - ref_kernel6.eta_edge[:4])) < 1e-10 * scale


def test_kernel_tolerance_refinement(ref_bath):
    loose = influence_coefficients(ref_bath, 5.0, 2, 1, epsrel=1e-8)
    tight = influence_coefficients(ref_bath, 5.0, 2, 1, epsrel=1e-11)
    scale = abs(tight.eta_mid[0])
    assert np.max(np.abs(loose.eta_mid - tight.eta_mid)) < 1e-6 * scale
    assert np.max(np.abs(loose.eta_edge - tight.eta_edge)) < 1e-6 * scale


def test_kernel_decay_is_slow_at_reference_step(ref_kernel6):
    # lag 3 (15 fs) is still inside the ~17 fs memory span; adequacy of a
    # 3-step window is decided by trajectory convergence, not by this ratio
    ratio = abs(ref_kernel6.eta_mid[3]) / abs(ref_kernel6.eta_mid[0])
    assert ratio == pytest.approx(1.1271, abs=2e-3)


def test_zero_coupling_kernel_rows():
    b = BathSpec(s=1.0, xi=0.0, omega_c=2000.0, T=77.0)
    kern = influence_coefficients(b, 5.0, 3, 10)
    assert np.all(kern.eta_mid == 0.0)
    assert np.all(kern.eta_edge == 0.0)
    assert np.all(kern.eta_corner == 0.0)
    assert kern.bath == b


def test_kernel_argument_validation(ref_bath):
    with pytest.raises(ValueError):
        influence_coefficients(ref_bath, 0.0, 3, 10)
    with pytest.raises(ValueError):
        influence_coefficients(ref_bath, 5.0, -1, 10)
    with pytest.raises(ValueError):
        influence_coefficients(ref_bath, 5.0, 3, 0)
    with pytest.raises(ValueError):
        kernel_from_response(lambda tau: np.zeros_like(tau), -1.0, 3)


# ---------------------------------------------------------------- cache files


def test_kernel_cache_round_trip(tmp_path, ref_bath):
    kern = influence_coefficients(ref_bath, 5.0, 2, 1)
    path = tmp_path / "ref_kernel.txt"
    kern.save(path)
    back = InfluenceKernel.load(path)
    assert back.dt == kern.dt
    assert back.dk_max == kern.dk_max
    assert back.bath == ref_bath
    assert np.array_equal(back.eta_mid, kern.eta_mid)
    assert np.array_equal(back.eta_edge, kern.eta_edge)
    assert np.array_equal(back.eta_corner, kern.eta_corner)


def test_kernel_cache_without_bath_metadata(tmp_path):
    kern = InfluenceKernel(
        dt=1.5, dk_max=1,
        eta_mid=np.array([0.1 + 0.2j, 0.3 - 0.4j]),
        eta_edge=np.array([0.05 + 0.0j, 0.1 - 0.1j]),
        eta_corner=np.array([0.0j, 0.02 + 0.01j]),
    )
    path = tmp_path / "bare_kernel.txt"
    kern.save(path)
    back = InfluenceKernel.load(path)
    assert back.bath is None
    assert back.dt == 1.5
    assert np.array_equal(back.eta_mid, kern.eta_mid)


def test_kernel_cache_rejects_missing_header(tmp_path):
    path = tmp_path / "broken.txt"
    path.write_text("lag, row, re_eta, im_eta\n0, mid, 1.0, 0.0\n", encoding="ascii")
    with pytest.raises(ValueError):
        InfluenceKernel.load(path)
