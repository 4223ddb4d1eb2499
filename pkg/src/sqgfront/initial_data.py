"""Initial-data generators shared by the CLI and the experiment batteries.

Every generator returns a zero-mean real field on the requested space.
Randomized spectra draw their phases in fixed frequency order from a
seeded generator, so enlarging the window extends the data instead of
reshuffling it, and reruns are bit-identical.
"""

from __future__ import annotations

import numpy as np

from .errors import ConfigError, DimensionMismatch
from .spectral import PeriodicField, SpectralSpace, analyze, cosine, synthesize

__all__ = [
    "single_mode",
    "multi_mode",
    "power_law",
    "exp_cos",
    "coefficients_from_file",
]


def single_mode(space: SpectralSpace, k: int = 1, amp: float = 0.05) -> PeriodicField:
    """amp * cos(k x)."""
    if k == 0:
        raise ConfigError("single_mode needs a nonzero frequency")
    return cosine(space, k, amp)


def multi_mode(space: SpectralSpace, modes) -> PeriodicField:
    """Sum of amp * cos(k x) over (k, amp) pairs."""
    out = None
    for k, amp in modes:
        if k == 0:
            raise ConfigError("multi_mode entries need nonzero frequencies")
        term = cosine(space, int(k), float(amp))
        out = term if out is None else out + term
    if out is None:
        raise ConfigError("multi_mode needs at least one (k, amp) pair")
    return out


def power_law(
    space: SpectralSpace,
    exponent: float,
    seed: int = 0,
    amp: float = 1.0,
) -> PeriodicField:
    """|c(xi)| = amp * |xi|^(-exponent) with seeded random phases.

    Phases are drawn for xi = 1, 2, ... in order, one per frequency.
    """
    n = space.n_max
    rng = np.random.default_rng(seed)
    theta = rng.uniform(0.0, 2.0 * np.pi, n)
    xi = np.arange(1, n + 1, dtype=float)
    half = amp * xi ** (-float(exponent)) * np.exp(1j * theta)
    c = np.zeros(space.n_coeffs, dtype=np.complex128)
    c[space.zero_index + 1 :] = half
    c[: space.zero_index] = np.conj(half[::-1])
    return PeriodicField(space, c)


def exp_cos(space: SpectralSpace, amp: float = 0.05) -> PeriodicField:
    """exp(cos x) with the mean removed, rescaled to sup norm amp.

    Entire data whose coefficients decay super-exponentially; the
    workhorse analytic profile for convergence and energy experiments.
    """
    f = analyze(space, np.exp(np.cos(space.nodes())))
    c = np.array(f.coeffs)
    c[space.zero_index] = 0.0
    g = PeriodicField(space, c)
    sup = float(np.max(np.abs(synthesize(g))))
    return g * (amp / sup)


def coefficients_from_file(space: SpectralSpace, path: str) -> PeriodicField:
    """Read lines "xi re im" for xi >= 1; negative modes follow by reality.

    Frequencies must be unique and fit the window; blank lines and lines
    starting with '#' are skipped.
    """
    c = np.zeros(space.n_coeffs, dtype=np.complex128)
    seen = set()
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            if len(parts) != 3:
                raise ConfigError(
                    f"{path}:{lineno}: expected 'xi re im', got {line!r}"
                )
            try:
                xi = int(parts[0])
                val = complex(float(parts[1]), float(parts[2]))
            except ValueError as err:
                raise ConfigError(f"{path}:{lineno}: {err}") from None
            if xi < 1 or xi > space.n_max:
                raise ConfigError(
                    f"{path}:{lineno}: frequency {xi} outside [1, {space.n_max}]"
                )
            if xi in seen:
                raise ConfigError(f"{path}:{lineno}: duplicate frequency {xi}")
            seen.add(xi)
            c[space.zero_index + xi] = val
            c[space.zero_index - xi] = np.conj(val)
    return PeriodicField(space, c)
