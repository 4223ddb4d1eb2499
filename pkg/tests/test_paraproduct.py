"""Cutoff geometry, paraproduct operators, and the expansion identities."""

from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sqgfront.errors import DimensionMismatch
from sqgfront.paraproduct import (
    CutoffChi,
    bony_remainder,
    chi_eval,
    fit_decay_slope,
    full_capture_factor,
    log_expansion_residual,
    log_square_defect,
    low_slot_cutoff_factor,
    operator_matrix,
    operator_norm,
    paraproduct,
    power_commutation_residual,
    triple_expansion_residual,
)
from sqgfront.spectral import (
    SpectralSpace,
    cosine,
    hs_norm,
    product,
    sine,
)

from conftest import smooth_field

CHI = CutoffChi()


# --- cutoff geometry ------------------------------------------------------------


def test_chi_plateau_bridge_kill():
    assert CHI.plateau_edge == pytest.approx(0.075)
    assert CHI(0.0) == 1.0
    assert CHI(0.075) == 1.0
    assert CHI(0.0875) == pytest.approx(0.5, abs=1e-14)  # midpoint of the bridge
    assert CHI(0.1) == 0.0
    assert CHI(0.9) == 0.0


def test_chi_monotone_and_smooth_range():
    r = np.linspace(0.0, 0.2, 401)
    vals = CHI(r)
    assert vals.shape == r.shape
    assert np.all(np.diff(vals) <= 1e-12)
    assert np.all((vals >= 0.0) & (vals <= 1.0))
    assert chi_eval(CHI, 0.05) == 1.0


def test_chi_validation():
    with pytest.raises(DimensionMismatch):
        CutoffChi(0.0)
    with pytest.raises(DimensionMismatch):
        CutoffChi(0.5)


def test_separation_thresholds():
    assert full_capture_factor(CHI) == pytest.approx((1 + 0.075) / (2 * 0.075))
    assert low_slot_cutoff_factor(CHI) == pytest.approx(0.2 / 0.9)
    narrow = CutoffChi(0.05)
    assert full_capture_factor(narrow) == pytest.approx(1.0375 / 0.075)
    assert low_slot_cutoff_factor(narrow) == pytest.approx(0.1 / 0.95)


# --- paraproduct basics ----------------------------------------------------------


def test_separated_pair_full_capture():
    # factor 16 is far beyond both thresholds: T_u v is the whole
    # product and both the swapped term and the remainder vanish
    sp = SpectralSpace(24)
    u = cosine(sp, 1, 0.7)
    v = cosine(sp, 16, 0.4)
    tu = paraproduct(u, v, CHI)
    assert hs_norm(tu - product(u, v), 0.0) < 1e-15
    assert hs_norm(paraproduct(v, u, CHI), 0.0) == 0.0
    assert hs_norm(bony_remainder(u, v, CHI), 0.0) < 1e-15


def test_comparable_pair_falls_to_remainder():
    sp = SpectralSpace(16)
    u = cosine(sp, 5, 1.0)
    v = cosine(sp, 6, 1.0)
    assert hs_norm(paraproduct(u, v, CHI), 0.0) == 0.0
    assert hs_norm(paraproduct(v, u, CHI), 0.0) == 0.0
    r = bony_remainder(u, v, CHI)
    assert hs_norm(r - product(u, v), 0.0) < 1e-15
    assert hs_norm(r, 0.0) > 0.1


@settings(max_examples=25, derandomize=True)
@given(s1=st.integers(0, 10_000), s2=st.integers(0, 10_000))
def test_bony_identity_property(s1, s2):
    sp = SpectralSpace(12)
    u = smooth_field(sp, seed=s1, amp=0.5)
    v = smooth_field(sp, seed=s2, amp=0.5)
    lhs = product(u, v)
    rhs = paraproduct(u, v, CHI) + paraproduct(v, u, CHI) + bony_remainder(u, v, CHI)
    assert hs_norm(lhs - rhs, 0.0) < 1e-14


def test_support_geometry_exhaustive():
    # every nonzero matrix entry keeps the symbol frequency small
    # against the argument: |xi - eta| / |eta| <= 2 eps / (1 - eps)
    for eps in (0.05, 0.1):
        chi = CutoffChi(eps)
        bound = 2.0 * eps / (1.0 - eps) + 1e-15
        sp = SpectralSpace(24)
        u = smooth_field(sp, seed=13, amp=1.0)
        m = operator_matrix(u, chi).matrix
        modes = sp.modes()
        nz = modes[modes != 0].astype(float)
        ratio = np.abs(nz[:, None] - nz[None, :]) / np.abs(nz[None, :])
        used = np.abs(m) > 0.0
        assert np.all(ratio[used] <= bound)


def test_paraproduct_scale():
    sp = SpectralSpace(12)
    u = smooth_field(sp, seed=14)
    v = smooth_field(sp, seed=15)
    a = paraproduct(u, v, CHI, scale=2.0 * math.pi)
    b = 2.0 * math.pi * paraproduct(u, v, CHI)
    assert hs_norm(a - b, 0.0) < 1e-15


def test_paraproduct_space_mismatch():
    with pytest.raises(DimensionMismatch):
        paraproduct(cosine(SpectralSpace(4), 1), cosine(SpectralSpace(5), 1), CHI)


# --- operator form ----------------------------------------------------------------


def test_operator_matrix_matches_application():
    sp = SpectralSpace(16)
    u = smooth_field(sp, seed=16)
    v = smooth_field(sp, seed=17)
    op = operator_matrix(u, CHI)
    assert hs_norm(op.apply(v) - paraproduct(u, v, CHI), 0.0) < 1e-15


@settings(max_examples=25, derandomize=True)
@given(seed=st.integers(0, 10_000))
def test_operator_self_adjoint(seed):
    sp = SpectralSpace(16)
    u = smooth_field(sp, seed=seed, amp=1.0)
    assert operator_matrix(u, CHI).hermitian_defect() <= 1e-13


def test_operator_norm_matches_dense():
    sp = SpectralSpace(16)
    u = smooth_field(sp, seed=18)
    op = operator_matrix(u, CHI)
    assert operator_norm(op) == pytest.approx(np.linalg.norm(op.matrix, 2), rel=1e-10)


def test_operator_apply_space_mismatch():
    op = operator_matrix(cosine(SpectralSpace(6), 1), CHI)
    with pytest.raises(DimensionMismatch):
        op.apply(cosine(SpectralSpace(7), 1))


# --- expansion identities -----------------------------------------------------------


def test_log_expansion_residual_decay():
    ks = (16, 32, 64, 128)
    res = []
    for k in ks:
        sp = SpectralSpace(k + 4)
        res.append(log_expansion_residual(cosine(sp, 1, 1.0), cosine(sp, k, 1.0), CHI))
    slope = fit_decay_slope(ks, res)
    # third-order Taylor legs leave a fourth-order residual, with a log
    # correction that drags the fit slightly past -4
    assert slope <= -3.5
    assert -4.3 < slope < -3.9


def test_power_commutation_integer_orders_exact():
    ks = (16, 32, 64)
    for s in (0.0, 1.0, 2.0):
        res = []
        for k in ks:
            sp = SpectralSpace(k + 4)
            res.append(
                power_commutation_residual(cosine(sp, 1, 1.0), cosine(sp, k, 1.0), s, CHI)
            )
        assert max(res) <= 1e-13
        assert fit_decay_slope(ks, res) == -math.inf


def test_power_commutation_fractional_decay():
    ks = (16, 32, 64, 128)
    res = []
    for k in ks:
        sp = SpectralSpace(k + 4)
        res.append(
            power_commutation_residual(cosine(sp, 1, 1.0), cosine(sp, k, 1.0), 0.25, CHI)
        )
    slope = fit_decay_slope(ks, res)
    assert slope <= -2.5
    assert -3.0 < slope < -2.6


def test_triple_expansion_bounded():
    norms = []
    for k in (16, 32, 64):
        sp = SpectralSpace(k + 8)
        norm, ratio = triple_expansion_residual(
            cosine(sp, 1, 1.0), sine(sp, 2, 1.0), cosine(sp, k, 1.0), 1.0, CHI
        )
        norms.append(norm)
        assert ratio < 1e-6
    assert max(norms) < 3.0


def test_log_square_defect_bounded():
    vals = []
    for k in (8, 16, 32, 64):
        sp = SpectralSpace(2 * k + 2)
        vals.append(log_square_defect(cosine(sp, k, 1.0), 1.0))
    assert max(vals) < 1.0
    assert min(vals) > 0.1  # genuinely nonzero, just not growing


def test_log_square_defect_zero_field():
    from sqgfront.spectral import zero_field

    assert log_square_defect(zero_field(SpectralSpace(8)), 1.0) == 0.0


# --- slope fitting ---------------------------------------------------------------


def test_fit_decay_slope_paths():
    assert fit_decay_slope((2, 4, 8), (1.0, 0.25, 0.0625)) == pytest.approx(-2.0)
    assert fit_decay_slope((2, 4), (1e-16, 1e-15)) == -math.inf
    with pytest.raises(DimensionMismatch):
        fit_decay_slope((2,), (1.0,))
    with pytest.raises(DimensionMismatch):
        fit_decay_slope((2, 4), (1.0, 0.5, 0.25))
    with pytest.raises(DimensionMismatch):
        fit_decay_slope((2, 4), (1.0, -0.5))
