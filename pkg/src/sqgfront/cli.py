"""Command-line harness: deterministic CSV output for runs and batteries.

Numeric cells are written with repr(), the shortest round-trip decimal,
so identical configs produce byte-identical files.  Rows are flushed as
they are produced; a halted run leaves a valid partial CSV behind.

Exit codes: 0 completed, 1 bad configuration, 2 continuation-criterion
halt, 3 blow-up.
"""

from __future__ import annotations

import argparse
import contextlib
import sys

from .errors import BlowUpError, ConfigError, ContinuationError, DimensionMismatch
from .evolution import integrate
from .experiments import bona_smith_table, convergence_study, stability_experiment
from .initial_data import power_law, single_mode
from .paraproduct import (
    CutoffChi,
    fit_decay_slope,
    log_expansion_residual,
    log_square_defect,
    power_commutation_residual,
    triple_expansion_residual,
)
from .runconfig import RunSpec, make_initial_data, parse_run_config
from .spectral import SpectralSpace, cosine, sine

__all__ = ["main"]


def _fmt(value) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _write_row(fh, values) -> None:
    fh.write(",".join(_fmt(v) for v in values) + "\n")
    fh.flush()


@contextlib.contextmanager
def _open_out(path):
    if path is None:
        yield sys.stdout
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            yield fh


def _cmd_run(spec: RunSpec, out_path) -> int:
    cfg = spec.solver
    phi0 = make_initial_data(spec, cfg.space)
    with _open_out(out_path) as fh:
        _write_row(fh, ["t", "E_s", "hs_norm", "opnorm", "margin", "w1inf", "flags"])

        def emit(state):
            r = state.report
            _write_row(fh, [r.t, r.energy, r.hs, r.opnorm, r.margin, r.w1inf, r.flags])

        try:
            integrate(phi0, cfg, callback=emit)
        except ContinuationError as err:
            print(f"halted: {err}", file=sys.stderr)
            return 2
        except BlowUpError as err:
            print(f"halted: {err}", file=sys.stderr)
            return 3
    return 0


def _identity_batteries(spec: RunSpec):
    """Residual sweeps per probe frequency, one per expansion identity."""
    chi = CutoffChi(spec.solver.eps)
    amp = spec.identities_amp
    ks = spec.identities_k

    def probe_pair(k):
        space = SpectralSpace(k + 4)
        return cosine(space, 1, amp), cosine(space, k, amp)

    batteries = []

    log_res = []
    for k in ks:
        u, v = probe_pair(k)
        log_res.append(log_expansion_residual(u, v, chi))
    batteries.append(("log_expansion", log_res))

    pow_res = []
    for k in ks:
        u, v = probe_pair(k)
        pow_res.append(power_commutation_residual(u, v, spec.identities_power, chi))
    batteries.append(("power_commutation", pow_res))

    triple_res = []
    for k in ks:
        space = SpectralSpace(k + 8)
        u = cosine(space, 1, amp)
        v = sine(space, 2, amp)
        w = cosine(space, k, amp)
        triple_res.append(triple_expansion_residual(u, v, w, 1.0, chi)[1])
    batteries.append(("triple_cyclic", triple_res))

    sq_res = []
    for k in ks:
        space = SpectralSpace(2 * k + 2)
        sq_res.append(log_square_defect(cosine(space, k, amp), 1.0))
    batteries.append(("log_square", sq_res))

    return ks, batteries, amp


def _cmd_identities(spec: RunSpec, out_path) -> int:
    ks, batteries, amp = _identity_batteries(spec)
    with _open_out(out_path) as fh:
        _write_row(fh, ["battery", "k", "residual", "slope"])
        for name, residuals in batteries:
            slope = fit_decay_slope(ks, residuals, scale=max(amp, 1.0) ** 3)
            for k, res in zip(ks, residuals):
                _write_row(fh, [name, k, float(res), float(slope)])
    return 0


def _cmd_convergence(spec: RunSpec, out_path) -> int:
    table = convergence_study(
        lambda space: make_initial_data(spec, space),
        spec.solver,
        spec.convergence_n,
        spec.convergence_dt,
    )
    with _open_out(out_path) as fh:
        _write_row(fh, ["kind", "coarse", "fine", "distance", "ratio", "status"])
        for row in table.spatial + table.temporal:
            _write_row(
                fh, [row.kind, row.coarse, row.fine, row.distance, row.ratio, row.status]
            )
    return 0


def _cmd_stability(spec: RunSpec, out_path) -> int:
    cfg = spec.solver
    space = cfg.space
    phi0 = make_initial_data(spec, space)
    psi0 = phi0 + single_mode(space, spec.stability_mode, spec.stability_amp)
    code = 0
    with _open_out(out_path) as fh:
        _write_row(fh, ["t", "distance", "fitted_m"])
        try:
            report = stability_experiment(phi0, psi0, spec.stability_r, cfg)
        except ContinuationError as err:
            report = getattr(err, "partial", None)
            print(f"halted: {err}", file=sys.stderr)
            code = 2
        except BlowUpError as err:
            report = getattr(err, "partial", None)
            print(f"halted: {err}", file=sys.stderr)
            code = 3
        if report is not None:
            for t, d in zip(report.times, report.distances):
                _write_row(fh, [t, d, report.fitted_m])
    return code


def _cmd_bona_smith(spec: RunSpec, out_path) -> int:
    s = spec.solver.s
    factor = spec.bona_smith_factor
    reference_space = SpectralSpace(factor * max(spec.bona_smith_n))
    reference = power_law(reference_space, s + 0.51, seed=spec.bona_smith_seed)
    table = bona_smith_table(reference, s, spec.bona_smith_n, spec.bona_smith_delta)
    with _open_out(out_path) as fh:
        _write_row(
            fh,
            [
                "n",
                "tail",
                "retained",
                "product",
                "slope_tail",
                "slope_retained",
                "slope_product",
            ],
        )
        for row in table.rows:
            _write_row(
                fh,
                [
                    row.n,
                    row.tail,
                    row.retained,
                    row.product,
                    table.slopes[0],
                    table.slopes[1],
                    table.slopes[2],
                ],
            )
    return 0


_COMMANDS = {
    "run": (_cmd_run, "integrate a run and record the energy monitor"),
    "identities": (_cmd_identities, "residual-decay tables for the para-expansions"),
    "convergence": (_cmd_convergence, "window and time-step refinement study"),
    "stability": (_cmd_stability, "co-evolution distance and fitted constant"),
    "bona-smith": (_cmd_bona_smith, "sharp-truncation rate table"),
}


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="sqgfront",
        description="Pseudo-spectral laboratory for a nonlocal dispersive "
        "front equation on the torus.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (_, help_text) in _COMMANDS.items():
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", required=True, help="INI run configuration")
        p.add_argument("--out", help="CSV destination (default: [output] path or stdout)")
    args = parser.parse_args(argv)

    try:
        spec = parse_run_config(args.config)
    except (ConfigError, OSError) as err:
        print(f"config error: {err}", file=sys.stderr)
        return 1

    out_path = args.out if args.out is not None else spec.output_path
    handler = _COMMANDS[args.command][0]
    try:
        return handler(spec, out_path)
    except (ConfigError, DimensionMismatch) as err:
        print(f"config error: {err}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
