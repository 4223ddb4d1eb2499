"""Fourier-side primitives: transforms, products, multipliers, norms."""

from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sqgfront.errors import DimensionMismatch
from sqgfront.spectral import (
    PeriodicField,
    SpectralSpace,
    abs_power_multiplier,
    analyze,
    apply_multiplier,
    cosine,
    d_power_multiplier,
    derivative_multiplier,
    dispersion_multiplier,
    dispersion_table,
    embed,
    field_from_coeffs,
    hermitian_defect,
    hs_norm,
    identity_multiplier,
    inner_l2,
    log_multiplier,
    product,
    product3,
    project,
    sine,
    sobolev_inf_norm,
    synthesize,
    zero_field,
)

from conftest import smooth_field


# --- spaces and fields --------------------------------------------------------


def test_space_layout():
    sp = SpectralSpace(8)
    assert sp.n_coeffs == 17
    assert sp.zero_index == 8
    assert sp.grid_size == 36  # default 4(N+1)
    assert list(sp.modes()) == list(range(-8, 9))
    assert len(sp.nodes()) == 36


def test_space_validation():
    with pytest.raises(DimensionMismatch):
        SpectralSpace(0)
    with pytest.raises(DimensionMismatch):
        SpectralSpace(8, grid_size=33)  # below the alias-free floor 4N+2
    assert SpectralSpace(8, grid_size=34).grid_size == 34


def test_field_validation_and_accessors():
    sp = SpectralSpace(4)
    with pytest.raises(DimensionMismatch):
        PeriodicField(sp, np.zeros(5))
    u = cosine(sp, 2, 0.6)
    assert u.coeff(2) == pytest.approx(0.3)
    assert u.coeff(-2) == pytest.approx(0.3)
    assert u.coeff(7) == 0.0  # outside the window reads as zero
    assert u.zero_mean
    assert u.mean_coeff == 0.0


def test_field_arithmetic():
    sp = SpectralSpace(6)
    u = cosine(sp, 1, 0.5)
    v = sine(sp, 3, 0.25)
    w = 2.0 * (u + v) - v * 2.0
    assert np.allclose(w.coeffs, (2.0 * u).coeffs)
    assert np.allclose((-u).coeffs, (u * -1.0).coeffs)
    with pytest.raises(DimensionMismatch):
        u + cosine(SpectralSpace(7), 1, 0.5)


def test_negative_stride_coefficients_accepted():
    # reversed views show up in the reflection path; the constructor
    # must not choke on non-contiguous input
    sp = SpectralSpace(5)
    u = smooth_field(sp, seed=3)
    v = PeriodicField(sp, u.coeffs[::-1])
    assert v.coeff(2) == u.coeff(-2)


def test_zero_field_and_from_coeffs():
    sp = SpectralSpace(4)
    z = zero_field(sp)
    assert hs_norm(z, 0.0) == 0.0
    c = np.zeros(sp.n_coeffs, dtype=complex)
    c[sp.zero_index + 1] = 1.0j
    c[sp.zero_index - 1] = -1.0j
    u = field_from_coeffs(sp, c)
    assert np.max(np.abs(synthesize(u) + 2.0 * np.sin(sp.nodes()))) < 1e-14


# --- transforms ----------------------------------------------------------------


def test_cosine_sine_pointwise():
    sp = SpectralSpace(10)
    x = sp.nodes()
    assert np.max(np.abs(synthesize(cosine(sp, 7, 0.3)) - 0.3 * np.cos(7 * x))) < 5e-15
    assert np.max(np.abs(synthesize(sine(sp, 4, 1.1)) - 1.1 * np.sin(4 * x))) < 5e-15


def test_analyze_synthesize_round_trip():
    sp = SpectralSpace(12)
    u = smooth_field(sp, seed=1)
    v = analyze(sp, synthesize(u))
    assert np.max(np.abs(v.coeffs - u.coeffs)) < 1e-15


@settings(max_examples=30, derandomize=True)
@given(seed=st.integers(0, 10_000), n=st.integers(2, 24))
def test_round_trip_property(seed, n):
    sp = SpectralSpace(n)
    u = smooth_field(sp, seed=seed, amp=1.0)
    v = analyze(sp, synthesize(u))
    assert np.max(np.abs(v.coeffs - u.coeffs)) < 1e-13


def test_analysis_mean_channel():
    sp = SpectralSpace(6)
    u = analyze(sp, np.cos(sp.nodes()) + 0.7)
    assert u.mean_coeff == pytest.approx(0.7)
    assert not u.zero_mean


def test_hermitian_defect_detects_asymmetry():
    sp = SpectralSpace(3)
    u = smooth_field(sp, seed=2)
    assert hermitian_defect(u) == 0.0
    c = np.array(u.coeffs)
    c[sp.zero_index + 1] += 1e-3
    assert hermitian_defect(PeriodicField(sp, c)) == pytest.approx(1e-3)


# --- products -------------------------------------------------------------------


def test_product_two_cosines():
    # cos(ax)cos(bx) = (cos((a-b)x) + cos((a+b)x)) / 2
    sp = SpectralSpace(12)
    w = product(cosine(sp, 5, 1.0), cosine(sp, 3, 1.0))
    want = cosine(sp, 2, 0.5) + cosine(sp, 8, 0.5)
    assert hs_norm(w - want, 0.0) < 1e-15


def _direct_convolution(u: PeriodicField, v: PeriodicField) -> PeriodicField:
    n = u.space.n_max
    out = np.zeros(u.space.n_coeffs, dtype=complex)
    for xi in range(-n, n + 1):
        acc = 0.0j
        for eta in range(-n, n + 1):
            if abs(xi - eta) <= n:
                acc += u.coeff(xi - eta) * v.coeff(eta)
        out[u.space.zero_index + xi] = acc
    return PeriodicField(u.space, out)


def test_product_matches_convolution():
    sp = SpectralSpace(6)
    u = smooth_field(sp, seed=4, amp=0.5)
    v = smooth_field(sp, seed=5, amp=0.5)
    assert hs_norm(product(u, v) - _direct_convolution(u, v), 0.0) < 1e-15


def test_product3_matches_iterated_convolution():
    sp = SpectralSpace(5)
    u = smooth_field(sp, seed=6, amp=0.5)
    v = smooth_field(sp, seed=7, amp=0.5)
    w = smooth_field(sp, seed=8, amp=0.5)
    # the retained window of u*v*w needs uv on a doubled window first
    wide = SpectralSpace(2 * sp.n_max)
    uv = _direct_convolution(embed(u, wide), embed(v, wide))
    uvw = np.zeros(sp.n_coeffs, dtype=complex)
    for xi in range(-sp.n_max, sp.n_max + 1):
        acc = 0.0j
        for eta in range(-sp.n_max, sp.n_max + 1):
            acc += uv.coeff(xi - eta) * w.coeff(eta)
        uvw[sp.zero_index + xi] = acc
    got = product3(u, v, w)
    assert np.max(np.abs(got.coeffs - uvw)) < 1e-15


def test_product_space_mismatch():
    with pytest.raises(DimensionMismatch):
        product(cosine(SpectralSpace(4), 1), cosine(SpectralSpace(5), 1))


# --- multipliers ----------------------------------------------------------------


def test_log_multiplier_single_modes():
    sp = SpectralSpace(64)
    logm = log_multiplier(sp)
    for k in (1, 2, 7, 64):
        got = apply_multiplier(logm, cosine(sp, k, 1.0))
        assert hs_norm(got - cosine(sp, k, math.log(k)), 0.0) < 1e-12


def test_abs_power_multiplier():
    sp = SpectralSpace(16)
    for s in (0.5, 2.0, -1.0):
        got = apply_multiplier(abs_power_multiplier(sp, s), sine(sp, 3, 2.0))
        assert hs_norm(got - sine(sp, 3, 2.0 * 3.0**s), 0.0) < 1e-13


def test_negative_power_requires_zero_mean():
    sp = SpectralSpace(4)
    u = analyze(sp, np.cos(sp.nodes()) + 1.0)
    with pytest.raises(DimensionMismatch):
        apply_multiplier(abs_power_multiplier(sp, -0.5), u)


def test_derivative_multiplier():
    sp = SpectralSpace(8)
    d1 = apply_multiplier(derivative_multiplier(sp, 1), cosine(sp, 3, 1.0))
    assert hs_norm(d1 - sine(sp, 3, -3.0), 0.0) < 1e-14
    d2 = apply_multiplier(derivative_multiplier(sp, 2), cosine(sp, 3, 1.0))
    assert hs_norm(d2 - cosine(sp, 3, -9.0), 0.0) < 1e-14
    with pytest.raises(DimensionMismatch):
        derivative_multiplier(sp, -1)


def test_signed_power_multiplier():
    # D = -i d/dx has the real odd symbol xi; D(cos) = i sin on the
    # coefficient side, so D^1 cos(kx) picks up k with opposite signs
    # on the two modes
    sp = SpectralSpace(8)
    u = cosine(sp, 5, 2.0)
    d = apply_multiplier(d_power_multiplier(sp, 1), u)
    assert d.coeff(5) == pytest.approx(5.0)
    assert d.coeff(-5) == pytest.approx(-5.0)
    # D^{-1} inverts it away from the mean
    back = apply_multiplier(d_power_multiplier(sp, -1), d)
    assert hs_norm(back - u, 0.0) < 1e-14
    # D^0 keeps the mean channel
    w = analyze(sp, np.cos(sp.nodes()) + 0.3)
    assert apply_multiplier(d_power_multiplier(sp, 0), w).mean_coeff == pytest.approx(0.3)


def test_derivative_is_i_times_signed_d():
    sp = SpectralSpace(8)
    u = smooth_field(sp, seed=9)
    lhs = apply_multiplier(derivative_multiplier(sp, 1), u)
    rhs = 1j * apply_multiplier(d_power_multiplier(sp, 1), u)
    assert hs_norm(lhs - rhs, 0.0) < 1e-15


def test_dispersion_family():
    sp = SpectralSpace(8)
    assert np.allclose(
        dispersion_multiplier(sp, 1.0).table, log_multiplier(sp).table
    )
    xi = np.array([0, 1, 2, 4])
    assert np.allclose(dispersion_table(xi, 2.0), [0.0, 1.0, 0.5, 0.25])
    assert np.allclose(dispersion_table(xi, 0.5), [0.0, 1.0, math.sqrt(2.0), 2.0])


def test_identity_multiplier():
    sp = SpectralSpace(4)
    u = smooth_field(sp, seed=10)
    assert hs_norm(apply_multiplier(identity_multiplier(sp), u) - u, 0.0) == 0.0


# --- projection and embedding ---------------------------------------------------


def test_project_and_embed():
    sp = SpectralSpace(10)
    u = smooth_field(sp, seed=11)
    p = project(u, 4)
    assert p.coeff(4) == u.coeff(4)
    assert p.coeff(5) == 0.0
    assert hs_norm(project(u, 10) - u, 0.0) == 0.0

    wide = SpectralSpace(15)
    e = embed(u, wide)
    assert e.coeff(10) == u.coeff(10)
    assert e.coeff(12) == 0.0
    assert hs_norm(embed(u, sp) - u, 0.0) == 0.0

    with pytest.raises(DimensionMismatch):
        project(u, 0)
    with pytest.raises(DimensionMismatch):
        project(u, 11)
    with pytest.raises(DimensionMismatch):
        embed(u, SpectralSpace(9))


# --- norms and pairings ----------------------------------------------------------


def test_hs_norm_closed_form():
    sp = SpectralSpace(16)
    for k, amp, s in ((3, 2.0, 4.0), (7, 0.1, -0.5), (16, 1.0, 0.0)):
        assert hs_norm(cosine(sp, k, amp), s) == pytest.approx(
            amp * k**s / math.sqrt(2.0), rel=1e-13
        )


def test_hs_norm_negative_order_needs_zero_mean():
    sp = SpectralSpace(4)
    u = analyze(sp, np.cos(sp.nodes()) + 1.0)
    with pytest.raises(DimensionMismatch):
        hs_norm(u, -1.0)


@settings(max_examples=25, derandomize=True)
@given(seed=st.integers(0, 10_000), c=st.floats(-8.0, 8.0, allow_nan=False))
def test_hs_norm_homogeneous(seed, c):
    sp = SpectralSpace(6)
    u = smooth_field(sp, seed=seed)
    assert hs_norm(c * u, 2.0) == pytest.approx(abs(c) * hs_norm(u, 2.0), abs=1e-12)


def test_sobolev_inf_norm():
    sp = SpectralSpace(12)
    assert sobolev_inf_norm(cosine(sp, 5, 1.0), 0) == pytest.approx(1.0, rel=1e-12)
    assert sobolev_inf_norm(cosine(sp, 5, 1.0), 1) == pytest.approx(6.0, rel=1e-12)
    assert sobolev_inf_norm(cosine(sp, 5, 1.0), 3) == pytest.approx(156.0, rel=1e-12)


def test_inner_l2():
    sp = SpectralSpace(8)
    u = cosine(sp, 3, 1.0)
    assert inner_l2(u, u) == pytest.approx(math.pi, rel=1e-13)
    assert inner_l2(u, sine(sp, 3, 1.0)) == pytest.approx(0.0, abs=1e-15)
    # Parseval against the grid quadrature
    v = smooth_field(sp, seed=12)
    grid = synthesize(v)
    quad = 2.0 * math.pi * float(np.mean(grid * grid))
    assert inner_l2(v, v) == pytest.approx(quad, rel=1e-12)
