"""Fourier-side primitives for periodic fields on the torus.

A field is represented by its Fourier coefficients c(xi) on the centered
window xi in {-N, ..., N}, with the convention

    f(x) = sum_xi c(xi) exp(i xi x),   c(xi) = (1/2pi) integral f exp(-i xi x) dx.

Collocation uses M equispaced nodes with M >= 4N + 2, large enough that
pointwise products of two (and the retained window of three) band-limited
fields are alias-free.  Real fields are kept exactly conjugate-symmetric:
analysis runs through the real FFT and derives negative modes by
conjugation, so Hermitian symmetry holds by construction, not to rounding.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import DimensionMismatch

__all__ = [
    "SpectralSpace",
    "PeriodicField",
    "MultiplierSymbol",
    "analyze",
    "synthesize",
    "field_from_coeffs",
    "zero_field",
    "cosine",
    "sine",
    "product",
    "product3",
    "apply_multiplier",
    "log_multiplier",
    "abs_power_multiplier",
    "derivative_multiplier",
    "d_power_multiplier",
    "dispersion_multiplier",
    "identity_multiplier",
    "dispersion_table",
    "project",
    "embed",
    "hs_norm",
    "sobolev_inf_norm",
    "inner_l2",
    "hermitian_defect",
]


def _readonly(a: np.ndarray) -> np.ndarray:
    a.flags.writeable = False
    return a


@dataclass(frozen=True)
class SpectralSpace:
    """Retained frequency window and collocation grid.

    Attributes:
        n_max: largest retained frequency N; modes run over {-N, ..., N}.
        grid_size: number of collocation nodes M; defaults to 4(N+1).
    """

    n_max: int
    grid_size: int = 0

    def __post_init__(self):
        if self.n_max < 1:
            raise DimensionMismatch(f"n_max must be >= 1, got {self.n_max}")
        if self.grid_size == 0:
            object.__setattr__(self, "grid_size", 4 * (self.n_max + 1))
        if self.grid_size < 4 * self.n_max + 2:
            raise DimensionMismatch(
                f"grid_size {self.grid_size} < 4*n_max + 2 = {4 * self.n_max + 2}; "
                "cubic products would alias into the retained window"
            )

    @property
    def n_coeffs(self) -> int:
        return 2 * self.n_max + 1

    @property
    def zero_index(self) -> int:
        """Index of the xi = 0 coefficient in the centered layout."""
        return self.n_max

    def modes(self) -> np.ndarray:
        return _space_modes(self)

    def nodes(self) -> np.ndarray:
        return _space_nodes(self)


@lru_cache(maxsize=None)
def _space_modes(space: SpectralSpace) -> np.ndarray:
    return _readonly(np.arange(-space.n_max, space.n_max + 1, dtype=np.int64))


@lru_cache(maxsize=None)
def _space_nodes(space: SpectralSpace) -> np.ndarray:
    m = space.grid_size
    return _readonly(2.0 * np.pi * np.arange(m) / m)


@dataclass(frozen=True, eq=False)
class PeriodicField:
    """A field carried by its centered coefficient array.

    Coefficients are complex and not forced to be conjugate-symmetric:
    intermediate quantities (for instance odd real multipliers applied to a
    real field) are legitimately non-symmetric.  Synthesis onto the grid is
    only defined for conjugate-symmetric content and checks for it.
    """

    space: SpectralSpace
    coeffs: np.ndarray

    def __post_init__(self):
        c = np.ascontiguousarray(self.coeffs, dtype=np.complex128)
        if c.shape != (self.space.n_coeffs,):
            raise DimensionMismatch(
                f"expected {self.space.n_coeffs} coefficients, got shape {c.shape}"
            )
        object.__setattr__(self, "coeffs", _readonly(c))

    @property
    def mean_coeff(self) -> complex:
        return complex(self.coeffs[self.space.zero_index])

    @property
    def zero_mean(self) -> bool:
        return self.coeffs[self.space.zero_index] == 0

    def coeff(self, xi: int) -> complex:
        if abs(xi) > self.space.n_max:
            return 0.0j
        return complex(self.coeffs[self.space.zero_index + xi])

    def __add__(self, other: "PeriodicField") -> "PeriodicField":
        _check_same_space(self, other)
        return PeriodicField(self.space, self.coeffs + other.coeffs)

    def __sub__(self, other: "PeriodicField") -> "PeriodicField":
        _check_same_space(self, other)
        return PeriodicField(self.space, self.coeffs - other.coeffs)

    def __neg__(self) -> "PeriodicField":
        return PeriodicField(self.space, -self.coeffs)

    def __mul__(self, scalar) -> "PeriodicField":
        return PeriodicField(self.space, self.coeffs * complex(scalar))

    __rmul__ = __mul__


def _check_same_space(u: PeriodicField, v: PeriodicField):
    if u.space != v.space:
        raise DimensionMismatch(
            f"fields live on different spaces: {u.space} vs {v.space}"
        )


def field_from_coeffs(space: SpectralSpace, coeffs) -> PeriodicField:
    return PeriodicField(space, np.array(coeffs, dtype=np.complex128))


def zero_field(space: SpectralSpace) -> PeriodicField:
    return PeriodicField(space, np.zeros(space.n_coeffs, dtype=np.complex128))


def cosine(space: SpectralSpace, k: int, amp: float = 1.0) -> PeriodicField:
    """amp * cos(k x) as a field; k = 0 gives the constant amp."""
    if abs(k) > space.n_max:
        raise DimensionMismatch(f"mode {k} outside window of {space}")
    c = np.zeros(space.n_coeffs, dtype=np.complex128)
    if k == 0:
        c[space.zero_index] = amp
    else:
        c[space.zero_index + k] = 0.5 * amp
        c[space.zero_index - k] = 0.5 * amp
    return PeriodicField(space, c)


def sine(space: SpectralSpace, k: int, amp: float = 1.0) -> PeriodicField:
    """amp * sin(k x) as a field."""
    if abs(k) > space.n_max or k == 0:
        raise DimensionMismatch(f"invalid sine mode {k} for {space}")
    c = np.zeros(space.n_coeffs, dtype=np.complex128)
    c[space.zero_index + k] = -0.5j * amp
    c[space.zero_index - k] = 0.5j * amp
    return PeriodicField(space, c)


def analyze(space: SpectralSpace, samples) -> PeriodicField:
    """Transform M real grid samples into the centered coefficient window.

    Negative modes are filled by conjugating the nonnegative half, so the
    result is exactly conjugate-symmetric.
    """
    s = np.asarray(samples)
    if s.shape != (space.grid_size,):
        raise DimensionMismatch(
            f"expected {space.grid_size} samples, got shape {s.shape}"
        )
    if np.iscomplexobj(s):
        if np.max(np.abs(s.imag)) > 1e-12 * max(1.0, np.max(np.abs(s.real))):
            raise DimensionMismatch("analyze expects real samples")
        s = s.real
    half = np.fft.rfft(s) / space.grid_size
    n = space.n_max
    c = np.empty(space.n_coeffs, dtype=np.complex128)
    c[n:] = half[: n + 1]
    c[:n] = np.conj(half[n:0:-1])
    return PeriodicField(space, c)


def hermitian_defect(u: PeriodicField) -> float:
    """max |c(-xi) - conj(c(xi))| over the window."""
    c = u.coeffs
    return float(np.max(np.abs(c[::-1] - np.conj(c))))


def synthesize(u: PeriodicField) -> np.ndarray:
    """Evaluate a conjugate-symmetric field on the collocation grid."""
    scale = 1.0 + float(np.max(np.abs(u.coeffs)))
    if hermitian_defect(u) > 1e-8 * scale:
        raise DimensionMismatch(
            "synthesize requires conjugate-symmetric coefficients"
        )
    m = u.space.grid_size
    half = np.zeros(m // 2 + 1, dtype=np.complex128)
    half[: u.space.n_max + 1] = u.coeffs[u.space.zero_index :]
    return np.fft.irfft(half * m, n=m)


def _half_spectrum(samples: np.ndarray, m: int) -> np.ndarray:
    return np.fft.rfft(samples) / m


def _field_from_half(space: SpectralSpace, half: np.ndarray) -> PeriodicField:
    n = space.n_max
    c = np.empty(space.n_coeffs, dtype=np.complex128)
    c[n:] = half[: n + 1]
    c[:n] = np.conj(half[n:0:-1])
    return PeriodicField(space, c)


def product(u: PeriodicField, v: PeriodicField) -> PeriodicField:
    """Pointwise product, exact on the retained window.

    Both factors are band-limited to N and the grid has M >= 4N + 2 nodes,
    so the 2N-band product does not alias at all.
    """
    _check_same_space(u, v)
    s = synthesize(u) * synthesize(v)
    return analyze(u.space, s)


def product3(u: PeriodicField, v: PeriodicField, w: PeriodicField) -> PeriodicField:
    """Triple pointwise product; exact on the retained window.

    True modes of the product reach 3N; on the M >= 4N + 2 grid their
    aliases land at magnitudes >= M - 3N > N, outside the window.
    """
    _check_same_space(u, v)
    _check_same_space(u, w)
    s = synthesize(u) * synthesize(v) * synthesize(w)
    return analyze(u.space, s)


@dataclass(frozen=True)
class MultiplierSymbol:
    """A Fourier multiplier given by its table over the centered window."""

    name: str
    space: SpectralSpace
    table: np.ndarray
    requires_zero_mean: bool = False

    def __post_init__(self):
        t = np.asarray(self.table)
        if t.shape != (self.space.n_coeffs,):
            raise DimensionMismatch(
                f"symbol table has shape {t.shape}, expected ({self.space.n_coeffs},)"
            )
        object.__setattr__(self, "table", _readonly(t))


def apply_multiplier(sym: MultiplierSymbol, u: PeriodicField) -> PeriodicField:
    """Multiply coefficients by the symbol table."""
    if sym.space != u.space:
        raise DimensionMismatch("symbol and field live on different spaces")
    if sym.requires_zero_mean and not u.zero_mean:
        raise DimensionMismatch(
            f"multiplier {sym.name} requires a zero-mean field"
        )
    return PeriodicField(u.space, sym.table * u.coeffs)


@lru_cache(maxsize=None)
def log_multiplier(space: SpectralSpace) -> MultiplierSymbol:
    """log|xi|, with the xi = 0 entry set to zero (kills the mean)."""
    xi = space.modes()
    table = np.zeros(space.n_coeffs)
    nz = xi != 0
    table[nz] = np.log(np.abs(xi[nz]).astype(float))
    return MultiplierSymbol("log|D|", space, table)


@lru_cache(maxsize=None)
def abs_power_multiplier(space: SpectralSpace, s: float) -> MultiplierSymbol:
    """|xi|^s on nonzero modes, zero at xi = 0.

    Negative powers require zero-mean input fields.
    """
    xi = space.modes()
    table = np.zeros(space.n_coeffs)
    nz = xi != 0
    table[nz] = np.abs(xi[nz]).astype(float) ** s
    return MultiplierSymbol(f"|D|^{s:g}", space, table, requires_zero_mean=s < 0)


@lru_cache(maxsize=None)
def derivative_multiplier(space: SpectralSpace, order: int = 1) -> MultiplierSymbol:
    """(i xi)^order, the order-th x-derivative."""
    if order < 0:
        raise DimensionMismatch("derivative order must be >= 0")
    xi = space.modes().astype(float)
    return MultiplierSymbol(f"d/dx^{order}", space, (1j * xi) ** order)


@lru_cache(maxsize=None)
def d_power_multiplier(space: SpectralSpace, k: int) -> MultiplierSymbol:
    """xi^k, i.e. the k-th power of D = -i d/dx; k < 0 needs zero mean."""
    xi = space.modes().astype(float)
    table = np.zeros(space.n_coeffs, dtype=float)
    nz = xi != 0
    if k >= 0:
        table = xi**k
        table[space.zero_index] = 0.0 if k > 0 else 1.0
    else:
        table[nz] = xi[nz] ** k
    return MultiplierSymbol(f"D^{k}", space, table, requires_zero_mean=k < 0)


def dispersion_table(xi: np.ndarray, alpha: float) -> np.ndarray:
    """Order-(1 - alpha) smoothing symbol of the dispersive family.

    log|xi| at alpha = 1, |xi|^(1-alpha) otherwise; zero at xi = 0.
    """
    table = np.zeros(xi.shape)
    nz = xi != 0
    a = np.abs(xi[nz]).astype(float)
    if alpha == 1.0:
        table[nz] = np.log(a)
    else:
        table[nz] = a ** (1.0 - alpha)
    return table


@lru_cache(maxsize=None)
def dispersion_multiplier(space: SpectralSpace, alpha: float = 1.0) -> MultiplierSymbol:
    return MultiplierSymbol(
        f"B_{alpha:g}", space, dispersion_table(space.modes(), alpha)
    )


@lru_cache(maxsize=None)
def identity_multiplier(space: SpectralSpace) -> MultiplierSymbol:
    return MultiplierSymbol("id", space, np.ones(space.n_coeffs))


def project(u: PeriodicField, n_keep: int) -> PeriodicField:
    """Zero out all modes with |xi| > n_keep (sharp truncation)."""
    if n_keep < 1 or n_keep > u.space.n_max:
        raise DimensionMismatch(
            f"projection width {n_keep} outside [1, {u.space.n_max}]"
        )
    c = np.array(u.coeffs)
    keep = np.abs(u.space.modes()) <= n_keep
    c[~keep] = 0.0
    return PeriodicField(u.space, c)


def embed(u: PeriodicField, space: SpectralSpace) -> PeriodicField:
    """Zero-pad a field into a wider window."""
    if space.n_max < u.space.n_max:
        raise DimensionMismatch("embed target window is narrower than source")
    c = np.zeros(space.n_coeffs, dtype=np.complex128)
    lo = space.zero_index - u.space.n_max
    c[lo : lo + u.space.n_coeffs] = u.coeffs
    return PeriodicField(space, c)


def hs_norm(u: PeriodicField, s: float) -> float:
    """Homogeneous Sobolev norm (sum over nonzero modes of |xi|^2s |c|^2)^(1/2)."""
    if s < 0 and not u.zero_mean:
        raise DimensionMismatch("negative-order norm requires a zero-mean field")
    xi = u.space.modes()
    nz = xi != 0
    w = np.abs(xi[nz]).astype(float) ** (2.0 * s)
    return float(np.sqrt(np.sum(w * np.abs(u.coeffs[nz]) ** 2)))


def sobolev_inf_norm(u: PeriodicField, sigma: int) -> float:
    """Sum over k <= sigma of the grid max of |d^k u / dx^k|.

    The grid max stands in for the sup; for the band-limited fields used
    here the difference is a quadrature detail, not a modeling one.
    """
    total = 0.0
    for k in range(sigma + 1):
        du = apply_multiplier(derivative_multiplier(u.space, k), u)
        total += float(np.max(np.abs(synthesize(du))))
    return total


def inner_l2(u: PeriodicField, v: PeriodicField) -> float:
    """L2 pairing: integral of u v over the torus = 2 pi sum c_u conj(c_v)."""
    _check_same_space(u, v)
    val = 2.0 * np.pi * np.sum(u.coeffs * np.conj(v.coeffs))
    return float(val.real)
