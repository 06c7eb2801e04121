"""Haar-distributed unitary and orthogonal matrices.

Both samplers orthonormalize a Gaussian matrix and then fix the phases (or
signs) of the triangular factor's diagonal. Without that correction the QR
output is not Haar distributed.
"""

from __future__ import annotations

import numpy as np


def _rng(seed) -> np.random.Generator:
    return np.random.default_rng(seed)


def haar_unitaries(m: int, count: int, seed=None) -> np.ndarray:
    """A stack of ``count`` Haar-random m x m unitaries, shape (count, m, m)."""
    if m < 1:
        raise ValueError(f"m must be >= 1, got {m}")
    rng = _rng(seed)
    z = rng.standard_normal((count, m, m)) + 1j * rng.standard_normal((count, m, m))
    q, r = np.linalg.qr(z / np.sqrt(2))
    d = np.diagonal(r, axis1=-2, axis2=-1)
    return q * (d / np.abs(d))[:, None, :]


def haar_unitary(m: int, seed=None) -> np.ndarray:
    return haar_unitaries(m, 1, seed)[0]


def haar_orthogonal(n: int, seed=None) -> np.ndarray:
    """Dense Haar-random element of O(n)."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    rng = _rng(seed)
    q, r = np.linalg.qr(rng.standard_normal((n, n)))
    return q * np.sign(np.diag(r))


def haar_frame(n: int, c: int, seed=None) -> np.ndarray:
    """First c columns of a Haar-random element of O(n), shape (n, c)."""
    if not 1 <= c <= n:
        raise ValueError(f"need 1 <= c <= n, got n={n}, c={c}")
    rng = _rng(seed)
    q, r = np.linalg.qr(rng.standard_normal((n, c)))
    return q * np.sign(np.diag(r))


def apply_haar_orthogonal(vectors: np.ndarray, seed=None) -> np.ndarray:
    """Apply one Haar-random R in O(n) to the columns of ``vectors`` (n x c).

    With V = Q_V R_V (thin QR), R V = (R Q_V) R_V and R Q_V is a uniformly
    random orthonormal c-frame, i.e. distributed as :func:`haar_frame`. So
    for c < n the full R is never formed and the cost is O(n c^2).
    """
    v = np.asarray(vectors, dtype=float)
    squeeze = v.ndim == 1
    if squeeze:
        v = v[:, None]
    n, c = v.shape
    if c >= n:
        out = haar_orthogonal(n, seed) @ v
    else:
        _, r_v = np.linalg.qr(v)
        out = haar_frame(n, c, seed) @ r_v
    return out[:, 0] if squeeze else out
