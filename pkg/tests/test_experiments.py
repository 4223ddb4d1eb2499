"""Experiment batteries: convergence ladders, co-evolution, truncation rates."""

from __future__ import annotations

import numpy as np
import pytest

from sqgfront.errors import ConfigError, ContinuationError, SqgError
from sqgfront.evolution import SolverConfig
from sqgfront.experiments import (
    bona_smith_table,
    convergence_study,
    stability_experiment,
    worker_count,
)
from sqgfront.initial_data import exp_cos, power_law, single_mode
from sqgfront.spectral import SpectralSpace


# --- thread budget -----------------------------------------------------------


def test_worker_count_env(monkeypatch):
    monkeypatch.setenv("SQGFRONT_THREADS", "2")
    assert worker_count() == 2
    monkeypatch.setenv("SQGFRONT_THREADS", "x")
    with pytest.raises(ConfigError):
        worker_count()
    monkeypatch.setenv("SQGFRONT_THREADS", "0")
    with pytest.raises(ConfigError):
        worker_count()
    monkeypatch.delenv("SQGFRONT_THREADS")
    assert worker_count() >= 1


# --- convergence --------------------------------------------------------------


def test_convergence_table_rates(monkeypatch):
    monkeypatch.setenv("SQGFRONT_THREADS", "1")
    cfg = SolverConfig(n_max=32, dt=0.01, t_end=0.1, adaptive_dt=False)
    tab = convergence_study(
        lambda sp: exp_cos(sp, amp=0.05), cfg, (8, 16, 32), (0.02, 0.01, 0.005)
    )
    # analytic data: the Galerkin error collapses super-exponentially
    assert np.isnan(tab.spatial[0].ratio)
    assert tab.spatial[0].distance == pytest.approx(8.411373e-07, rel=1e-4)
    assert tab.spatial[1].ratio == pytest.approx(8.774774e-06, rel=1e-4)
    # fourth-order stepping: halving the step divides the distance by 16
    assert np.isnan(tab.temporal[0].ratio)
    assert 12.0 < 1.0 / tab.temporal[1].ratio < 20.0
    assert all(r.status == "ok" for r in tab.spatial + tab.temporal)


def test_convergence_spatial_exact_for_linear_flow():
    # with the flux off, the modes never couple: a single mode inside the
    # coarsest window evolves identically at every size
    cfg = SolverConfig(n_max=32, dt=0.01, t_end=0.1, flux_coeff=0.0, adaptive_dt=False)
    tab = convergence_study(
        lambda sp: single_mode(sp, 2, 0.05), cfg, (8, 16, 32), (0.02, 0.01)
    )
    assert all(r.distance == 0.0 for r in tab.spatial)


def test_convergence_validation():
    cfg = SolverConfig(n_max=16, t_end=0.05)
    data = lambda sp: exp_cos(sp, amp=0.05)
    with pytest.raises(ConfigError, match="sorted"):
        convergence_study(data, cfg, (16, 8), (0.02, 0.01))
    with pytest.raises(ConfigError, match="at least two"):
        convergence_study(data, cfg, (16,), (0.02, 0.01))
    with pytest.raises(ConfigError, match="at least two"):
        convergence_study(data, cfg, (8, 16), (0.02,))


def test_convergence_records_failed_cells():
    # an over-steep cell halts; its row is marked instead of raising
    cfg = SolverConfig(n_max=16, dt=4.0, t_end=8.0, adaptive_dt=False)
    tab = convergence_study(
        lambda sp: exp_cos(sp, amp=1.0), cfg, (8, 16), (4.0, 2.0)
    )
    assert any(r.status != "ok" for r in tab.temporal)
    assert all(np.isnan(r.distance) for r in tab.temporal if r.status != "ok")


# --- stability -----------------------------------------------------------------


def test_stability_constant_is_scale_free():
    cfg = SolverConfig(n_max=32, t_end=0.25, adaptive_dt=False)
    phi0 = exp_cos(cfg.space, amp=0.05)
    fitted = []
    for amp in (1e-4, 1e-5):
        rep = stability_experiment(phi0, phi0 + single_mode(cfg.space, 2, amp), 2.0, cfg)
        assert rep.initial_distance == pytest.approx(amp * 2.0 * np.sqrt(2.0))
        assert rep.fitted_m >= 1.0
        assert rep.times[0] == 0.0 and rep.times[-1] == cfg.t_end
        fitted.append(rep.fitted_m)
    assert fitted[0] == pytest.approx(1.0000103550766042, rel=1e-9)
    assert abs(fitted[0] - fitted[1]) < 0.2 * (fitted[0] - 1.0)


def test_stability_validation():
    cfg = SolverConfig(n_max=16, t_end=0.1)
    phi0 = exp_cos(cfg.space, amp=0.05)
    with pytest.raises(ConfigError, match="below s - 1"):
        stability_experiment(phi0, phi0, 3.0, cfg)
    with pytest.raises(ContinuationError) as info:
        stability_experiment(single_mode(cfg.space, 1, 5.0), phi0, 2.0, cfg)
    assert info.value.t == 0.0


def test_stability_halt_carries_partial():
    cfg = SolverConfig(n_max=16, dt=4.0, t_end=8.0, monitor_cadence=1, adaptive_dt=False)
    phi0 = exp_cos(cfg.space, amp=1.0)
    with pytest.raises(SqgError) as info:
        stability_experiment(phi0, phi0 + single_mode(cfg.space, 2, 1e-3), 2.0, cfg)
    rep = info.value.partial
    assert rep.times[0] == 0.0
    assert rep.r == 2.0


def test_stability_identical_data_gives_nan_fit():
    cfg = SolverConfig(n_max=16, t_end=0.05, adaptive_dt=False)
    phi0 = exp_cos(cfg.space, amp=0.05)
    rep = stability_experiment(phi0, phi0, 2.0, cfg)
    assert rep.initial_distance == 0.0
    assert np.isnan(rep.fitted_m)


# --- truncation rates ------------------------------------------------------------


def test_bona_smith_rates_on_power_law():
    ref = power_law(SpectralSpace(512), 4.51, seed=0)
    tab = bona_smith_table(ref, 4.0, (16, 32, 64, 128), 0.1)
    st, sr, sp_ = tab.slopes
    assert st == pytest.approx(-1.9845, abs=2e-3)
    assert sr == pytest.approx(1.0763, abs=2e-3)
    assert sp_ == pytest.approx(-0.9083, abs=2e-3)
    assert tab.rows[0].tail == pytest.approx(2.5153032e-03, rel=1e-5)
    assert tab.rows[0].product == pytest.approx(
        tab.rows[0].tail * tab.rows[0].retained
    )


def test_bona_smith_band_limited_tail_is_zero():
    # data already inside the smallest window: nothing is removed, and a
    # slope cannot be fitted from all-zero tails
    ref = single_mode(SpectralSpace(64), 3, 0.1)
    tab = bona_smith_table(ref, 4.0, (8, 16, 32), 0.1)
    assert all(r.tail == 0.0 for r in tab.rows)
    assert np.isnan(tab.slopes[0])
    assert np.isfinite(tab.slopes[1])


def test_bona_smith_validation():
    ref = power_law(SpectralSpace(64), 4.51)
    with pytest.raises(ConfigError, match="sorted"):
        bona_smith_table(ref, 4.0, (32, 16), 0.1)
    with pytest.raises(ConfigError, match="exceeds"):
        bona_smith_table(ref, 4.0, (32, 128), 0.1)
