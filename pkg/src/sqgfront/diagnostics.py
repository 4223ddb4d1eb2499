"""Weighted-energy reports and continuation monitoring.

The energy at order s pairs |D|^s phi against the operator weight
(2 - T_{phi_x}^2)^(2s+1) applied to the same field,

    E = 2 pi sum_k mu_k^(2s+1) |<e_k, |D|^s phi>|^2,

computed in the eigenbasis of the weight.  Reporting the plain Sobolev
norm from the same projections makes the two-sided comparison

    margin^(2s+1) * 2 pi * hs^2  <=  E  <=  2^(2s+1) * 2 pi * hs^2

hold term by term, so violations can only come from summation rounding.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .calculus import build_weight
from .errors import DimensionMismatch, NotPositiveDefinite
from .paraproduct import (
    CutoffChi,
    _nonzero_part,
    operator_matrix,
    operator_norm,
)
from .spectral import (
    PeriodicField,
    abs_power_multiplier,
    apply_multiplier,
    derivative_multiplier,
    hs_norm,
    sobolev_inf_norm,
)

__all__ = [
    "EnergyReport",
    "energy_es",
    "energy_report",
    "continuation_check",
]


@dataclass(frozen=True)
class EnergyReport:
    """Snapshot of the energy monitor at one time.

    Attributes:
        t: report time.
        energy: weighted energy at the monitored order (NaN on breach).
        hs: homogeneous Sobolev norm at the same order.
        opnorm: squared operator norm of T_{phi_x}.
        margin: smallest eigenvalue of 2 - T_{phi_x}^2.
        w1inf: sup norm of the field plus its first derivative.
        positivity_ok: margin stayed above the configured floor.
        blowup_suspected: non-finite coefficients were seen.
    """

    t: float
    energy: float
    hs: float
    opnorm: float
    margin: float
    w1inf: float
    positivity_ok: bool
    blowup_suspected: bool

    @property
    def flags(self) -> str:
        """Compact status string for CSV rows: 'ok' or failure labels."""
        parts = []
        if not self.positivity_ok:
            parts.append("positivity")
        if self.blowup_suspected:
            parts.append("blowup")
        return "+".join(parts) if parts else "ok"

    @property
    def healthy(self) -> bool:
        return self.positivity_ok and not self.blowup_suspected


def _finite(phi: PeriodicField) -> bool:
    return bool(np.all(np.isfinite(phi.coeffs)))


def energy_es(
    phi: PeriodicField,
    s: float,
    chi: CutoffChi,
    delta_pos: float = 1e-8,
    t: float = 0.0,
) -> EnergyReport:
    """Weighted energy of order s with the full monitor payload.

    Raises NotPositiveDefinite when the weight margin is at or below
    delta_pos; use energy_report() for a non-raising variant.
    """
    if s <= 0:
        raise DimensionMismatch(f"energy order must be positive, got {s}")
    if not phi.zero_mean:
        raise DimensionMismatch("energy monitor requires a zero-mean field")
    w = build_weight(phi, 2.0 * s + 1.0, chi, delta_pos)
    v = apply_multiplier(abs_power_multiplier(phi.space, s), phi)
    proj = np.abs(w.vectors.conj().T @ _nonzero_part(v)) ** 2
    energy = 2.0 * np.pi * float(np.dot(w.eigenvalues ** w.power, proj))
    hs = float(np.sqrt(np.sum(proj)))
    return EnergyReport(
        t=float(t),
        energy=energy,
        hs=hs,
        opnorm=w.opnorm_sq,
        margin=w.margin,
        w1inf=sobolev_inf_norm(phi, 1),
        positivity_ok=True,
        blowup_suspected=False,
    )


def energy_report(
    phi: PeriodicField,
    s: float,
    chi: CutoffChi,
    delta_pos: float = 1e-8,
    t: float = 0.0,
) -> EnergyReport:
    """energy_es that degrades to a flagged report instead of raising.

    Non-finite coefficients give a blow-up flagged row; a positivity
    breach gives a row with the measured margin and NaN energy.
    """
    if not _finite(phi):
        nan = float("nan")
        return EnergyReport(float(t), nan, nan, nan, nan, nan, False, True)
    try:
        return energy_es(phi, s, chi, delta_pos, t)
    except NotPositiveDefinite as err:
        return EnergyReport(
            t=float(t),
            energy=float("nan"),
            hs=hs_norm(phi, s),
            opnorm=2.0 - err.margin,
            margin=err.margin,
            w1inf=sobolev_inf_norm(phi, 1),
            positivity_ok=False,
            blowup_suspected=False,
        )


def continuation_check(
    phi: PeriodicField,
    chi: CutoffChi,
    delta_pos: float = 1e-8,
    s: float = 4.0,
) -> tuple[bool, bool]:
    """Pure predicate behind the continuation criterion.

    Returns (norm_finite, positivity_ok): the order-s norm is finite and
    the squared norm of T_{phi_x} stays below 2 - delta_pos.  Never
    raises; non-finite input fails both flags.
    """
    if not _finite(phi):
        return False, False
    norm_finite = bool(np.isfinite(hs_norm(phi, s)))
    phix = apply_multiplier(derivative_multiplier(phi.space, 1), phi)
    opnorm = operator_norm(operator_matrix(phix, chi)) ** 2
    return norm_finite, bool(opnorm < 2.0 - delta_pos)
