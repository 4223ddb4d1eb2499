"""Shared helpers for the test suite."""

from __future__ import annotations

import numpy as np

from sqgfront.spectral import PeriodicField, SpectralSpace


def smooth_field(space: SpectralSpace, seed: int = 0, amp: float = 0.1) -> PeriodicField:
    """Random real zero-mean field with a rapidly decaying spectrum.

    Deterministic in the seed; the decay keeps every derivative used in
    the batteries well resolved on the window.
    """
    rng = np.random.default_rng(seed)
    n = space.n_max
    k = np.arange(1, n + 1, dtype=float)
    mag = amp * np.exp(-0.4 * k)
    half = mag * np.exp(1j * rng.uniform(0.0, 2.0 * np.pi, n))
    c = np.zeros(space.n_coeffs, dtype=np.complex128)
    c[space.zero_index + 1 :] = half
    c[: space.zero_index] = np.conj(half[::-1])
    return PeriodicField(space, c)
