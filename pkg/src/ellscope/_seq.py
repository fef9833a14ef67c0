"""Deterministic low-discrepancy sampling (Halton sequences)."""

from __future__ import annotations

import numpy as np

_PRIMES = (2, 3, 5, 7, 11, 13)


def _vdc(count: int, base: int, skip: int) -> np.ndarray:
    out = np.empty(count)
    for k in range(count):
        i = k + skip
        f = 1.0
        x = 0.0
        while i > 0:
            f /= base
            x += f * (i % base)
            i //= base
        out[k] = x
    return out


def halton(count: int, dim: int, skip: int = 20) -> np.ndarray:
    """First `count` points of the Halton sequence in [0, 1)^dim.

    Fully deterministic; `skip` drops the initial degenerate points.
    """
    if dim > len(_PRIMES):
        raise ValueError(f"halton supports up to {len(_PRIMES)} dimensions")
    return np.column_stack([_vdc(count, _PRIMES[d], skip) for d in range(dim)])
