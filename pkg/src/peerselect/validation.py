"""Input validation helpers shared by the estimators and the library surface."""

from __future__ import annotations

import numpy as np

from .keyspace import KeySpace


def check_demand_matrix(demand, ks: KeySpace | None = None) -> np.ndarray:
    """Validate a demand matrix and return it as a float ndarray.

    Requires a square matrix with a power-of-two side, nonnegative entries
    and an all-zero diagonal.  When ``ks`` is given the side must match
    ``ks.n``.
    """
    d = np.asarray(demand, dtype=float)
    if d.ndim != 2 or d.shape[0] != d.shape[1]:
        raise ValueError(f"demand matrix must be square, got shape {d.shape}")
    n = d.shape[0]
    if ks is None:
        ks = KeySpace(n)  # raises on non-power-of-two
    elif ks.n != n:
        raise ValueError(f"demand matrix is {n}x{n} but keyspace has n={ks.n}")
    if not np.isfinite(d).all():
        raise ValueError("demand matrix contains non-finite entries")
    if (d < 0).any():
        raise ValueError("demand matrix contains negative entries")
    if np.diagonal(d).any():
        raise ValueError("demand matrix diagonal must be all zero")
    return d


def check_pairs(pairs, ks: KeySpace) -> np.ndarray:
    """Validate an array of (src, dst) key pairs against a keyspace."""
    p = np.asarray(pairs, dtype=np.int64)
    if p.ndim == 1 and p.shape[0] == 2:
        p = p.reshape(1, 2)
    if p.ndim != 2 or p.shape[1] != 2:
        raise ValueError(f"expected an array of (src, dst) pairs, got shape {p.shape}")
    if p.size and (p.min() < 0 or p.max() >= ks.n):
        raise ValueError(f"pair entries outside [0, {ks.n})")
    return p
