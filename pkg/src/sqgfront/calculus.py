"""Fractional powers of the para-differential weight 2 - T_{phi_x}^2.

Two independent realizations are provided.  The working one diagonalizes
the Hermitian operator matrix once and maps eigenvalues through mu^p; it is
exact up to the eigensolve and cheap enough to call inside the time-step
monitor.  The second builds f(A) v from the resolvent alone through the
Helffer-Sjostrand formula

    f(A) = -(1/pi) int dbar f~(z) (z - A)^{-1} dalpha dbeta,

with a degree-2 almost-analytic extension f~ and graded contour quadrature.
It never sees the spectral decomposition, which makes it a genuine oracle
for the eigenvalue route, at the price of ~1e5 small solves; keep it to
small windows.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import DimensionMismatch, NotPositiveDefinite, ResolventError
from .paraproduct import CutoffChi, _field_from_nonzero, _nonzero_part, operator_matrix
from .spectral import (
    PeriodicField,
    SpectralSpace,
    apply_multiplier,
    derivative_multiplier,
    hs_norm,
)

__all__ = [
    "WeightOperator",
    "build_weight",
    "apply_weight",
    "ContourQuadrature",
    "build_contour_quadrature",
    "helffer_sjostrand_apply",
    "weight_derivative_residual",
]


def _fix_signs(vectors: np.ndarray) -> np.ndarray:
    """Rotate each eigenvector so its first nonnegligible entry is real > 0.

    Removes the arbitrary phase so repeated runs produce byte-identical
    output.
    """
    v = np.array(vectors)
    for j in range(v.shape[1]):
        col = v[:, j]
        mags = np.abs(col)
        top = mags.max()
        if top == 0.0:
            continue
        i = int(np.argmax(mags > 1e-12 * top))
        phase = col[i] / abs(col[i])
        v[:, j] = col * np.conj(phase)
    return v


@dataclass(frozen=True, eq=False)
class WeightOperator:
    """Spectral form of (2 - T_{phi_x}^2)^p on the nonzero-mode window.

    eigenvalues are ascending, so eigenvalues[0] is the positivity margin;
    the constant mode is an exact invariant channel with weight 2^p.
    """

    space: SpectralSpace
    chi: CutoffChi
    power: float
    eigenvalues: np.ndarray
    vectors: np.ndarray

    @property
    def margin(self) -> float:
        return float(self.eigenvalues[0])

    @property
    def opnorm_sq(self) -> float:
        """Squared operator norm of T_{phi_x} (equals 2 - margin)."""
        return 2.0 - self.margin

    def with_power(self, power: float) -> "WeightOperator":
        return WeightOperator(
            self.space, self.chi, float(power), self.eigenvalues, self.vectors
        )

    def quadratic_form(self, v: PeriodicField, power: float) -> float:
        """sum_k mu_k^power |<e_k, v>|^2 plus the 2^power mean channel."""
        proj = np.abs(self.vectors.conj().T @ _nonzero_part(v)) ** 2
        total = float(np.dot(self.eigenvalues**power, proj))
        mean = abs(v.mean_coeff) ** 2
        if mean:
            total += 2.0**power * mean
        return total


def build_weight(
    phi: PeriodicField,
    power: float,
    chi: CutoffChi,
    delta_pos: float = 1e-8,
) -> WeightOperator:
    """Diagonalize 2 - T_{phi_x}^2 and stage the power p.

    The eigensystem comes from T_{phi_x} itself (mu = 2 - lambda^2 with the
    same eigenvectors), which keeps mu <= 2 exact in floating point.
    Raises NotPositiveDefinite when the margin min(mu) falls to delta_pos.
    """
    phix = apply_multiplier(derivative_multiplier(phi.space, 1), phi)
    op = operator_matrix(phix, chi)
    lam, vec = np.linalg.eigh(op.matrix)
    mu = 2.0 - lam**2
    order = np.argsort(mu, kind="stable")
    mu = mu[order]
    vec = _fix_signs(vec[:, order])
    margin = float(mu[0])
    if margin <= delta_pos:
        raise NotPositiveDefinite(margin, delta_pos)
    mu.flags.writeable = False
    vec.flags.writeable = False
    return WeightOperator(phi.space, chi, float(power), mu, vec)


def apply_weight(w: WeightOperator, v: PeriodicField, power=None) -> PeriodicField:
    """(2 - T^2)^p v through the staged eigensystem."""
    if v.space != w.space:
        raise DimensionMismatch("weight and field live on different spaces")
    p = w.power if power is None else float(power)
    vec = _nonzero_part(v)
    out = w.vectors @ (w.eigenvalues**p * (w.vectors.conj().T @ vec))
    field = _field_from_nonzero(w.space, out)
    if v.mean_coeff:
        c = np.array(field.coeffs)
        c[w.space.zero_index] = 2.0**p * v.mean_coeff
        field = PeriodicField(w.space, c)
    return field


# --- Helffer-Sjostrand oracle -----------------------------------------------

# C^3 smoothstep: value 0 -> 1 on [0, 1] with three vanishing derivatives at
# both ends, so the almost-analytic extension below stays C^3.
_S3 = np.polynomial.Polynomial([0, 0, 0, 0, 35, -84, 70, -20])
_S3D = [_S3.deriv(k) for k in range(4)]


def _smoothstep(t: np.ndarray, order: int) -> np.ndarray:
    t = np.clip(t, 0.0, 1.0)
    out = _S3D[order](t)
    if order > 0:
        # outside the bridge all derivatives vanish
        out = np.where((t <= 0.0) | (t >= 1.0), 0.0, out)
    return out


@dataclass(frozen=True)
class ContourQuadrature:
    """Graded tensor quadrature for the half-plane contour integral.

    nodes/weights discretize the upper half plane only; the apply step
    visits each node and its mirror image (A is complex Hermitian, so the
    lower half plane needs its own resolvent solves).  chi1_breaks are the
    breakpoints (support_lo, plateau_lo, plateau_hi, support_hi) of the
    spectral cutoff; chi0_radius is the support radius of the vertical one.
    """

    nodes: np.ndarray
    weights: np.ndarray
    chi1_breaks: tuple
    chi0_radius: float

    @property
    def node_count(self) -> int:
        return int(self.nodes.size)


@lru_cache(maxsize=None)
def _leggauss(order: int):
    x, w = np.polynomial.legendre.leggauss(order)
    return x, w


def _panel_nodes(edges: np.ndarray, order: int):
    """Gauss-Legendre nodes and weights on each consecutive panel."""
    x, w = _leggauss(order)
    a = edges[:-1]
    b = edges[1:]
    half = 0.5 * (b - a)
    mid = 0.5 * (b + a)
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return nodes, weights


def build_contour_quadrature(
    spectrum_lo: float,
    spectrum_hi: float = 2.0,
    eps_cut: float = 1e-4,
    refine: int = 0,
) -> ContourQuadrature:
    """Build the node set for spectra inside [spectrum_lo, spectrum_hi].

    The vertical integral is cut below eps_cut (the integrand is O(beta)
    there, so the truncation error is O(eps_cut^2)) and graded in geometric
    panels up to the cutoff radius.  Horizontal panels are refined near the
    spectral cluster at matching scale; away from it the integrand is
    analytic and fixed panels suffice.  refine > 0 tightens everything for
    convergence studies.
    """
    if spectrum_lo <= 0:
        raise NotPositiveDefinite(spectrum_lo, 0.0)
    eps_cut = eps_cut / (8.0**refine)
    order_b = 12 + 2 * refine
    order_a = 10 + 2 * refine
    min_w = 2e-3 / (2.0**refine)

    plateau_lo = max(spectrum_lo - 0.05, 0.5 * spectrum_lo)
    plateau_hi = spectrum_hi + 0.05
    support_lo = max(plateau_lo - 0.3, 0.5 * plateau_lo)
    support_hi = plateau_hi + 0.3
    breaks = (support_lo, plateau_lo, plateau_hi, support_hi)
    r0 = 0.5

    # The smoothstep bridges are only C^3 at their joins, so every join
    # must be a panel edge or Gauss accuracy collapses to the kink order.
    n_geo = int(np.ceil(np.log2(0.5 * r0 / eps_cut)))
    beta_edges = np.concatenate(
        [eps_cut * 2.0 ** np.arange(n_geo + 1), np.linspace(0.5 * r0, r0, 5)[1:]]
    )
    beta_edges[n_geo] = 0.5 * r0

    cluster_lo = max(spectrum_lo - 0.02, support_lo)
    cluster_hi = min(spectrum_hi + 0.02, support_hi)

    def _seg(a: float, b: float, n: int) -> np.ndarray:
        return np.linspace(a, b, max(2, n + 1))

    all_nodes = []
    all_weights = []
    for lo_b, hi_b in zip(beta_edges[:-1], beta_edges[1:]):
        bn, bw = _panel_nodes(np.array([lo_b, hi_b]), order_b)
        width = max(float(lo_b), min_w)
        n_cl = max(1, int(np.ceil((cluster_hi - cluster_lo) / width)))
        segs = [
            _seg(support_lo, plateau_lo, 6),
            _seg(plateau_lo, cluster_lo, 3),
            _seg(cluster_lo, cluster_hi, n_cl),
            _seg(cluster_hi, plateau_hi, 3),
            _seg(plateau_hi, support_hi, 6),
        ]
        an_parts = []
        aw_parts = []
        for edges in segs:
            if edges[-1] <= edges[0]:
                continue
            an, aw = _panel_nodes(edges, order_a)
            an_parts.append(an)
            aw_parts.append(aw)
        an = np.concatenate(an_parts)
        aw = np.concatenate(aw_parts)
        z = an[None, :] + 1j * bn[:, None]
        wt = aw[None, :] * bw[:, None]
        all_nodes.append(z.ravel())
        all_weights.append(wt.ravel())

    nodes = np.concatenate(all_nodes)
    weights = np.concatenate(all_weights)
    nodes.flags.writeable = False
    weights.flags.writeable = False
    return ContourQuadrature(nodes, weights, breaks, r0)


def _chi1(alpha: np.ndarray, breaks, order: int) -> np.ndarray:
    s_lo, p_lo, p_hi, s_hi = breaks
    w_l = p_lo - s_lo
    w_r = s_hi - p_hi
    out = np.zeros(alpha.shape)
    plateau = (alpha >= p_lo) & (alpha <= p_hi)
    left = (alpha > s_lo) & (alpha < p_lo)
    right = (alpha > p_hi) & (alpha < s_hi)
    if order == 0:
        out[plateau] = 1.0
    out[left] = _smoothstep((alpha[left] - s_lo) / w_l, order) / w_l**order
    out[right] = (
        _smoothstep((s_hi - alpha[right]) / w_r, order)
        * (-1.0) ** order
        / w_r**order
    )
    return out


def _f_pack(alpha: np.ndarray, p: float, breaks):
    """f = alpha^p * chi1 and its first three derivatives."""
    g0 = alpha**p
    g1 = p * alpha ** (p - 1.0)
    g2 = p * (p - 1.0) * alpha ** (p - 2.0)
    g3 = p * (p - 1.0) * (p - 2.0) * alpha ** (p - 3.0)
    c0 = _chi1(alpha, breaks, 0)
    c1 = _chi1(alpha, breaks, 1)
    c2 = _chi1(alpha, breaks, 2)
    c3 = _chi1(alpha, breaks, 3)
    f0 = g0 * c0
    f1 = g1 * c0 + g0 * c1
    f2 = g2 * c0 + 2.0 * g1 * c1 + g0 * c2
    f3 = g3 * c0 + 3.0 * g2 * c1 + 3.0 * g1 * c2 + g0 * c3
    return f0, f1, f2, f3


def _dbar_extension(z: np.ndarray, p: float, quad: ContourQuadrature) -> np.ndarray:
    """dbar of the degree-2 almost-analytic extension of f at z = a + ib.

    dbar f~ = -(b^2/4) f'''(a) chi0(b) + (i/2)(f + ib f' - b^2 f''/2) chi0'(b);
    the O(b^2) vanishing near the real axis is what tames the resolvent.
    """
    a = z.real
    b = z.imag
    f0, f1, f2, f3 = _f_pack(a, p, quad.chi1_breaks)
    half = 0.5 * quad.chi0_radius
    t = (b - half) / half
    chi0 = 1.0 - _smoothstep(t, 0)
    chi0p = -_smoothstep(t, 1) / half
    p_ext = f0 + 1j * b * f1 - 0.5 * b**2 * f2
    return -0.25 * b**2 * f3 * chi0 + 0.5j * p_ext * chi0p


def helffer_sjostrand_apply(
    phi: PeriodicField,
    power: float,
    v: PeriodicField,
    chi: CutoffChi,
    quad: ContourQuadrature = None,
    delta_pos: float = 1e-8,
    chunk: int = 2048,
) -> PeriodicField:
    """(2 - T_{phi_x}^2)^power v via resolvent quadrature only.

    When no quadrature is given, one is built from the eigensolve-free
    lower bound margin >= 2 - ||T||_F^2, keeping this path fully
    independent of the diagonalization it cross-checks.
    """
    if v.space != phi.space:
        raise DimensionMismatch("phi and v live on different spaces")
    phix = apply_multiplier(derivative_multiplier(phi.space, 1), phi)
    t_mat = operator_matrix(phix, chi).matrix
    if quad is None:
        m_lb = 2.0 - float(np.linalg.norm(t_mat)) ** 2
        if m_lb <= delta_pos:
            raise NotPositiveDefinite(m_lb, delta_pos)
        quad = build_contour_quadrature(m_lb)
    dim = t_mat.shape[0]
    a_mat = 2.0 * np.eye(dim) - t_mat @ t_mat
    vec = _nonzero_part(v)
    acc = np.zeros(dim, dtype=np.complex128)
    eye = np.eye(dim)
    for start in range(0, quad.node_count, chunk):
        z = quad.nodes[start : start + chunk]
        w = quad.weights[start : start + chunk]
        dbar = _dbar_extension(z, power, quad)
        live = dbar != 0.0
        if not np.any(live):
            continue
        z, w, dbar = z[live], w[live], dbar[live]
        # visit each node and its mirror image: A is complex Hermitian, so
        # the lower half plane is not the conjugate of the upper one.
        both_z = np.concatenate([z, np.conj(z)])
        both_c = np.concatenate([w * dbar, w * np.conj(dbar)])
        systems = both_z[:, None, None] * eye[None, :, :] - a_mat[None, :, :]
        rhs = np.broadcast_to(vec[:, None], (both_z.size, dim, 1))
        try:
            sols = np.linalg.solve(systems, rhs)[:, :, 0]
        except np.linalg.LinAlgError:
            bad = None
            for zz in both_z:
                try:
                    np.linalg.solve(zz * eye - a_mat, vec)
                except np.linalg.LinAlgError:
                    bad = zz
                    break
            raise ResolventError(bad if bad is not None else both_z[0])
        acc += both_c @ sols
    out = _field_from_nonzero(phi.space, -acc / np.pi)
    if v.mean_coeff:
        c = np.array(out.coeffs)
        c[phi.space.zero_index] = 2.0**power * v.mean_coeff
        out = PeriodicField(phi.space, c)
    return out


def weight_derivative_residual(
    phi: PeriodicField,
    phi_t: PeriodicField,
    power: float,
    psi: PeriodicField,
    chi: CutoffChi,
    h: float,
    delta_pos: float = 1e-8,
) -> float:
    """Defect of the product-rule surrogate for d/dt (2 - T^2)^power psi.

    Central finite difference in t (psi held fixed) against
    -power * (2 - T^2)^(power-1) (T_{phi_x} T_{phi_tx} + T_{phi_tx} T_{phi_x}) psi,
    measured in H0.  The gap is the operator-ordering remainder plus the
    O(h^2) difference error; for small data the latter dominates.
    """
    space = phi.space
    w_plus = build_weight(phi + h * phi_t, power, chi, delta_pos)
    w_minus = build_weight(phi - h * phi_t, power, chi, delta_pos)
    fd = (apply_weight(w_plus, psi) - apply_weight(w_minus, psi)) * (0.5 / h)
    dx = derivative_multiplier(space, 1)
    t_x = operator_matrix(apply_multiplier(dx, phi), chi)
    t_tx = operator_matrix(apply_multiplier(dx, phi_t), chi)
    bracket = t_x.apply(t_tx.apply(psi)) + t_tx.apply(t_x.apply(psi))
    w_base = build_weight(phi, power - 1.0, chi, delta_pos)
    analytic = (-power) * apply_weight(w_base, bracket)
    return hs_norm(fd - analytic, 0.0)
