"""Experiment batteries: convergence, stability, truncation-rate tables.

Each battery is a pure function from configuration to an immutable
result record; failed cells are recorded, not raised, so a table is
still produced when individual runs halt.  Independent cells fan out
over a small thread pool capped by the SQGFRONT_THREADS variable.
"""

from __future__ import annotations

import dataclasses
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .diagnostics import continuation_check
from .errors import ConfigError, ContinuationError, SqgError
from .evolution import SolverConfig, SolverState, default_time_step, integrate, step
from .spectral import PeriodicField, SpectralSpace, embed, hs_norm, project

__all__ = [
    "ConvergenceRow",
    "ConvergenceTable",
    "StabilityReport",
    "BonaSmithRow",
    "BonaSmithTable",
    "worker_count",
    "convergence_study",
    "stability_experiment",
    "bona_smith_table",
]


def worker_count() -> int:
    """Thread budget for independent cells; SQGFRONT_THREADS caps it."""
    raw = os.environ.get("SQGFRONT_THREADS")
    if raw is None:
        return min(4, os.cpu_count() or 1)
    try:
        n = int(raw)
    except ValueError:
        raise ConfigError(f"SQGFRONT_THREADS must be an integer, got {raw!r}") from None
    if n < 1:
        raise ConfigError(f"SQGFRONT_THREADS must be >= 1, got {n}")
    return n


def _map_cells(fn, args):
    """Order-preserving parallel map; falls back to serial for one worker."""
    workers = worker_count()
    if workers == 1 or len(args) <= 1:
        return [fn(a) for a in args]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, args))


# --- Galerkin / time-step convergence ----------------------------------------


@dataclass(frozen=True)
class ConvergenceRow:
    """One comparison cell: coarse vs fine run, distance in the order-2 norm."""

    kind: str  # "space" or "time"
    coarse: float
    fine: float
    distance: float
    ratio: float  # this distance over the previous one; NaN on the first row
    status: str


@dataclass(frozen=True)
class ConvergenceTable:
    spatial: tuple[ConvergenceRow, ...]
    temporal: tuple[ConvergenceRow, ...]


def _rows_from_distances(kind, labels, dists, statuses) -> tuple[ConvergenceRow, ...]:
    rows = []
    prev = None
    for (a, b), d, st in zip(labels, dists, statuses):
        if prev is None or not np.isfinite(prev) or not np.isfinite(d) or prev == 0.0:
            ratio = float("nan")
        else:
            ratio = d / prev
        rows.append(ConvergenceRow(kind, float(a), float(b), d, ratio, st))
        prev = d
    return tuple(rows)


def convergence_study(
    make_data: Callable[[SpectralSpace], PeriodicField],
    cfg: SolverConfig,
    n_list,
    dt_list,
) -> ConvergenceTable:
    """Successive-difference table over window sizes and time steps.

    Spatial cells rerun the same data generator at each window size with
    one shared time step (the default rule at the finest window, or the
    configured step if smaller), so the successive differences isolate
    the Galerkin truncation.  Temporal cells fix the window at cfg.n_max
    and ladder the step; consecutive differences then show the
    fourth-order Richardson ratio.  Adaptive halving is disabled in both
    ladders because it would change the steps being compared.
    """
    n_list = [int(n) for n in n_list]
    dt_list = sorted((float(d) for d in dt_list), reverse=True)
    if sorted(n_list) != n_list:
        raise ConfigError("window list must be sorted ascending")
    if len(n_list) < 2 or len(dt_list) < 2:
        raise ConfigError("convergence study needs at least two windows and steps")

    dt_space = min(cfg.dt, default_time_step(max(n_list)))

    def run_spatial(n: int):
        run_cfg = dataclasses.replace(
            cfg, n_max=n, dt=dt_space, adaptive_dt=False
        )
        try:
            return integrate(make_data(run_cfg.space), run_cfg)[-1].phi, "ok"
        except SqgError as err:
            return None, type(err).__name__

    def run_temporal(dt: float):
        run_cfg = dataclasses.replace(cfg, dt=dt, adaptive_dt=False)
        try:
            return integrate(make_data(run_cfg.space), run_cfg)[-1].phi, "ok"
        except SqgError as err:
            return None, type(err).__name__

    spatial_runs = _map_cells(run_spatial, n_list)
    temporal_runs = _map_cells(run_temporal, dt_list)

    wide = SpectralSpace(max(n_list))
    sp_dists, sp_status = [], []
    for (pa, sa), (pb, sb) in zip(spatial_runs, spatial_runs[1:]):
        if pa is None or pb is None:
            sp_dists.append(float("nan"))
            sp_status.append(sa if pa is None else sb)
        else:
            sp_dists.append(hs_norm(embed(pb, wide) - embed(pa, wide), 2.0))
            sp_status.append("ok")

    tm_dists, tm_status = [], []
    for (pa, sa), (pb, sb) in zip(temporal_runs, temporal_runs[1:]):
        if pa is None or pb is None:
            tm_dists.append(float("nan"))
            tm_status.append(sa if pa is None else sb)
        else:
            tm_dists.append(hs_norm(pa - pb, 2.0))
            tm_status.append("ok")

    return ConvergenceTable(
        spatial=_rows_from_distances(
            "space", list(zip(n_list, n_list[1:])), sp_dists, sp_status
        ),
        temporal=_rows_from_distances(
            "time", list(zip(dt_list, dt_list[1:])), tm_dists, tm_status
        ),
    )


# --- Lipschitz stability ------------------------------------------------------


@dataclass(frozen=True)
class StabilityReport:
    """Distance history of two co-evolved solutions in the order-r norm."""

    r: float
    times: tuple[float, ...]
    distances: tuple[float, ...]
    initial_distance: float
    fitted_m: float


def _fit_m(dists) -> float:
    d0 = dists[0]
    if not np.isfinite(d0) or d0 == 0.0:
        return float("nan")
    return float(max(dists) / d0)


def stability_experiment(
    phi0: PeriodicField,
    psi0: PeriodicField,
    r: float,
    cfg: SolverConfig,
) -> StabilityReport:
    """Co-evolve two data sets in lockstep and track their separation.

    The fitted constant is max over recorded times of distance(t) over
    distance(0); it is 1 or larger by construction and should not move
    when the perturbation is scaled down.  Comparison order r must stay
    below s - 1.  On a halt the raised error carries the partial report
    as its `partial` attribute.
    """
    if r >= cfg.s - 1.0:
        raise ConfigError(
            f"comparison order r = {r} must lie below s - 1 = {cfg.s - 1.0}"
        )
    for f in (phi0, psi0):
        ok_norm, ok_pos = continuation_check(f, cfg.chi, cfg.delta_pos, cfg.s)
        if not (ok_norm and ok_pos):
            raise ContinuationError(0.0, float("nan"), cfg.delta_pos)

    sa = SolverState(0.0, phi0, 0)
    sb = SolverState(0.0, psi0, 0)
    times = [0.0]
    dists = [hs_norm(phi0 - psi0, r)]

    def partial() -> StabilityReport:
        return StabilityReport(
            float(r), tuple(times), tuple(dists), dists[0], _fit_m(dists)
        )

    while sa.t < cfg.t_end:
        try:
            for _ in range(cfg.monitor_cadence):
                remaining = cfg.t_end - sa.t
                if remaining <= 0.0:
                    break
                h = remaining if remaining <= cfg.dt else cfg.dt
                exact_end = remaining <= cfg.dt
                sa = step(sa, cfg, dt=h)
                sb = step(sb, cfg, dt=h)
                if exact_end:
                    sa = dataclasses.replace(sa, t=cfg.t_end)
                    sb = dataclasses.replace(sb, t=cfg.t_end)
        except SqgError as err:
            err.partial = partial()
            raise
        times.append(sa.t)
        dists.append(hs_norm(sa.phi - sb.phi, r))
        for st in (sa, sb):
            ok_norm, ok_pos = continuation_check(st.phi, cfg.chi, cfg.delta_pos, cfg.s)
            if not (ok_norm and ok_pos):
                err = ContinuationError(st.t, float("nan"), cfg.delta_pos)
                err.partial = partial()
                raise err
    return partial()


# --- truncation-rate table ----------------------------------------------------


@dataclass(frozen=True)
class BonaSmithRow:
    n: int
    tail: float  # order-2 norm of what truncation removes
    retained: float  # order-(s+1+delta) norm of what it keeps
    product: float


@dataclass(frozen=True)
class BonaSmithTable:
    s: float
    delta: float
    rows: tuple[BonaSmithRow, ...]
    # fitted log-log slopes of (tail, retained, product) against n
    slopes: tuple[float, float, float]


def _fit_slope(ns, vals) -> float:
    pairs = [(n, v) for n, v in zip(ns, vals) if np.isfinite(v) and v > 0.0]
    if len(pairs) < 2:
        return float("nan")
    xs = np.log([p[0] for p in pairs])
    ys = np.log([p[1] for p in pairs])
    return float(np.polyfit(xs, ys, 1)[0])


def bona_smith_table(
    phi0: PeriodicField,
    s: float,
    n_list,
    delta: float = 0.1,
) -> BonaSmithTable:
    """Sharp-truncation rates against the window size.

    For data with a known order-s spectrum, the removed tail measured at
    order 2 decays like n^-(s-2), the retained part measured at order
    s+1+delta grows like n^(1+delta), and their product decays like
    n^-(s-3-delta); the fitted slopes report all three.  phi0 must live
    on a window wider than every table entry.
    """
    n_list = [int(n) for n in n_list]
    if sorted(n_list) != n_list:
        raise ConfigError("window list must be sorted ascending")
    if n_list and n_list[-1] > phi0.space.n_max:
        raise ConfigError(
            f"table window {n_list[-1]} exceeds the reference window "
            f"{phi0.space.n_max}"
        )
    rows = []
    for n in n_list:
        kept = project(phi0, n)
        tail = hs_norm(phi0 - kept, 2.0)
        retained = hs_norm(kept, s + 1.0 + delta)
        rows.append(BonaSmithRow(n, tail, retained, tail * retained))
    slopes = (
        _fit_slope(n_list, [r.tail for r in rows]),
        _fit_slope(n_list, [r.retained for r in rows]),
        _fit_slope(n_list, [r.product for r in rows]),
    )
    return BonaSmithTable(float(s), float(delta), tuple(rows), slopes)
