"""Covariance matrices, passive phase-space rotations and their symmetrization.

Conventions:

* shot-noise units, the vacuum has unit quadrature variance;
* quadratures interleaved per mode, (x_1, p_1, x_2, p_2, ...);
* a two-party matrix lists all of Alice's modes first, then Bob's.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .haar import haar_unitaries

SYMMETRY_TOL = 1e-12
PHYSICALITY_TOL = 1e-9
UNITARY_TOL = 1e-10

SIGMA_Z = np.diag([1.0, -1.0])


class CovarianceFormatError(ValueError):
    """Malformed serialized covariance matrix."""


def omega(m: int) -> np.ndarray:
    """Symplectic form, a direct sum of m blocks [[0, 1], [-1, 0]]."""
    return np.kron(np.eye(m), np.array([[0.0, 1.0], [-1.0, 0.0]]))


def p_sign_flip(m: int) -> np.ndarray:
    """D = diag(1, -1, 1, -1, ...), the sign flip of every p quadrature."""
    return np.tile([1.0, -1.0], m)


def interleaved_to_block(m: int) -> np.ndarray:
    """Permutation P with (P v) = (x_1..x_m, p_1..p_m) for interleaved v."""
    order = np.concatenate([np.arange(0, 2 * m, 2), np.arange(1, 2 * m, 2)])
    return np.eye(2 * m)[order]


@dataclass
class CovarianceMatrix:
    """2m x 2m real symmetric matrix, interleaved ordering."""

    entries: np.ndarray

    def __post_init__(self):
        g = np.asarray(self.entries, dtype=float)
        if g.ndim != 2 or g.shape[0] != g.shape[1] or g.shape[0] % 2:
            raise ValueError(f"covariance must be 2m x 2m, got shape {g.shape}")
        if not np.allclose(g, g.T, rtol=0, atol=SYMMETRY_TOL):
            raise ValueError("covariance matrix is not symmetric")
        self.entries = g

    def __array__(self, dtype=None, copy=None):
        return self.entries if dtype is None else self.entries.astype(dtype)

    @property
    def modes(self) -> int:
        return self.entries.shape[0] // 2

    def is_physical(self, tol: float = PHYSICALITY_TOL) -> bool:
        return is_physical(self.entries, tol)

    def to_json(self) -> str:
        return json.dumps(
            {
                "modes": self.modes,
                "ordering": "interleaved",
                "entries": self.entries.ravel().tolist(),
            }
        )

    @classmethod
    def from_json(cls, text: str) -> "CovarianceMatrix":
        try:
            obj = json.loads(text)
        except json.JSONDecodeError as exc:
            raise CovarianceFormatError(f"invalid JSON: {exc}") from exc
        if not isinstance(obj, dict):
            raise CovarianceFormatError("expected a JSON object")
        missing = {"modes", "ordering", "entries"} - obj.keys()
        if missing:
            raise CovarianceFormatError(f"missing field(s): {sorted(missing)}")
        if obj["ordering"] != "interleaved":
            raise CovarianceFormatError(
                f"unsupported ordering {obj['ordering']!r}, expected 'interleaved'"
            )
        m = obj["modes"]
        if not isinstance(m, int) or m < 1:
            raise CovarianceFormatError(f"'modes' must be a positive integer, got {m!r}")
        entries = obj["entries"]
        if not isinstance(entries, list) or len(entries) != 4 * m * m:
            raise CovarianceFormatError(f"'entries' must hold {4 * m * m} numbers")
        try:
            arr = np.array(entries, dtype=float).reshape(2 * m, 2 * m)
        except (TypeError, ValueError) as exc:
            raise CovarianceFormatError(f"non-numeric entries: {exc}") from exc
        try:
            return cls(arr)
        except ValueError as exc:
            raise CovarianceFormatError(str(exc)) from exc


def symplectic_eigenvalues(gamma) -> np.ndarray:
    """Moduli of the eigenvalues of i Omega Gamma, each listed once, ascending."""
    g = np.asarray(gamma, dtype=float)
    m = g.shape[0] // 2
    ev = np.abs(np.linalg.eigvals(1j * omega(m) @ g))
    return np.sort(ev)[::2]


def is_physical(gamma, tol: float = PHYSICALITY_TOL) -> bool:
    """Uncertainty principle Gamma + i Omega >= 0, up to ``tol``."""
    g = np.asarray(gamma, dtype=float)
    m = g.shape[0] // 2
    return bool(np.linalg.eigvalsh(g + 1j * omega(m)).min() >= -tol)


# -- rotations ----------------------------------------------------------------


def _realify(u: np.ndarray) -> np.ndarray:
    """Real 2m x 2m image of (a stack of) complex m x m matrices."""
    *batch, m, _ = u.shape
    s = np.empty((*batch, 2 * m, 2 * m))
    s[..., 0::2, 0::2] = u.real
    s[..., 0::2, 1::2] = -u.imag
    s[..., 1::2, 0::2] = u.imag
    s[..., 1::2, 1::2] = u.real
    return s


def unitary_to_symplectic(U_re, U_im=None) -> np.ndarray:
    """Phase-space matrix of the passive interferometer a -> U a.

    With a_j = (x_j + i p_j)/2, mode j picks up x' = Re(U) x - Im(U) p and
    p' = Im(U) x + Re(U) p. ``U_re`` may also be a complex matrix with
    ``U_im`` omitted.
    """
    if U_im is None:
        u = np.asarray(U_re, dtype=complex)
    else:
        u = np.asarray(U_re, dtype=float) + 1j * np.asarray(U_im, dtype=float)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {u.shape}")
    if not np.allclose(u.conj().T @ u, np.eye(u.shape[0]), rtol=0, atol=UNITARY_TOL):
        raise ValueError("input matrix is not unitary")
    return _realify(u)


def haar_symplectic_orthogonal(m: int, seed=None) -> np.ndarray:
    """Symplectic image of a Haar-random m-mode unitary."""
    return _realify(haar_unitaries(m, 1, seed)[0])


def conjugate_transform(S: np.ndarray) -> np.ndarray:
    """Flip the sign of every p row, then every p column: D S D."""
    S = np.asarray(S, dtype=float)
    d = p_sign_flip(S.shape[-1] // 2)
    return S * d[:, None] * d[None, :]


def orthogonality_residual(S) -> float:
    S = np.asarray(S, dtype=float)
    return float(np.abs(S.T @ S - np.eye(S.shape[0])).max())


def symplectic_residual(S) -> float:
    S = np.asarray(S, dtype=float)
    w = omega(S.shape[0] // 2)
    return float(np.abs(S.T @ w @ S - w).max())


# -- two-party covariance matrices ---------------------------------------------


@dataclass(frozen=True)
class SymmetricCovariance:
    """The three-parameter form [[X I, Z sigma_z], [Z sigma_z, Y I]]."""

    X: float
    Y: float
    Z: float

    def matrix(self) -> np.ndarray:
        out = np.zeros((4, 4))
        out[:2, :2] = self.X * np.eye(2)
        out[2:, 2:] = self.Y * np.eye(2)
        out[:2, 2:] = out[2:, :2] = self.Z * SIGMA_Z
        return out

    def is_physical(self, tol: float = PHYSICALITY_TOL) -> bool:
        if self.X < 1 - tol or self.Y < 1 - tol:
            return False
        return bool(symplectic_eigenvalues(self.matrix()).min() >= 1 - tol)


def _check_4x4(gamma) -> np.ndarray:
    g = np.asarray(gamma, dtype=float)
    if g.shape != (4, 4):
        raise ValueError(f"expected a 4 x 4 covariance matrix, got shape {g.shape}")
    return g


def symmetrize_covariance(gamma) -> SymmetricCovariance:
    """X = (X11+X22)/2, Y = (Y11+Y22)/2, Z = (Z11-Z22)/2 from (x_A, p_A, x_B, p_B)."""
    g = _check_4x4(gamma)
    return SymmetricCovariance(
        X=(g[0, 0] + g[1, 1]) / 2,
        Y=(g[2, 2] + g[3, 3]) / 2,
        Z=(g[0, 2] - g[1, 3]) / 2,
    )


def twirl_block(gamma) -> np.ndarray:
    """Exact average of a 4 x 4 block over R(theta) on A and R(-theta) on B.

    Alice's and Bob's blocks become isotropic. In the cross block the
    sigma_z part survives, and so does the sigma_x part (Z12+Z21)/2, which
    commutes the same way; :func:`symmetrize_covariance` drops it.
    """
    g = _check_4x4(gamma)
    sym = symmetrize_covariance(g).matrix()
    zx = (g[0, 3] + g[1, 2]) / 2
    sym[0, 3] = sym[3, 0] = sym[1, 2] = sym[2, 1] = zx
    return sym


def mode_block(gamma, i: int) -> np.ndarray:
    """4 x 4 block (x_Ai, p_Ai, x_Bi, p_Bi) of a two-party matrix."""
    g = np.asarray(gamma, dtype=float)
    m = g.shape[0] // 4
    idx = [2 * i, 2 * i + 1, 2 * m + 2 * i, 2 * m + 2 * i + 1]
    return g[np.ix_(idx, idx)]


def mode_averaged_block(gamma) -> np.ndarray:
    g = np.asarray(gamma, dtype=float)
    m = g.shape[0] // 4
    return sum(mode_block(g, i) for i in range(m)) / m


def epr_covariance(X: float) -> np.ndarray:
    """Two-mode squeezed vacuum: Y = X, Z = sqrt(X^2 - 1)."""
    if X < 1:
        raise ValueError(f"EPR variance must be >= 1, got X={X}")
    return SymmetricCovariance(X, X, np.sqrt(X * X - 1)).matrix()


def epr_multimode(X: float, m: int) -> np.ndarray:
    """m independent EPR pairs in two-party ordering (4m x 4m)."""
    return block_sum([epr_covariance(X)] * m)


def block_sum(blocks) -> np.ndarray:
    """Two-party matrix whose i-th mode pair carries ``blocks[i]``, uncorrelated otherwise."""
    m = len(blocks)
    out = np.zeros((4 * m, 4 * m))
    for i, b in enumerate(blocks):
        idx = [2 * i, 2 * i + 1, 2 * m + 2 * i, 2 * m + 2 * i + 1]
        out[np.ix_(idx, idx)] = _check_4x4(b)
    return out


def _two_party_modes(gamma) -> int:
    g = np.asarray(gamma)
    if g.ndim != 2 or g.shape[0] != g.shape[1] or g.shape[0] % 4:
        raise ValueError(f"two-party covariance must be 4m x 4m, got {g.shape}")
    return g.shape[0] // 4


def check_conjugate_invariance(gamma, S, conjugate: bool = True) -> float:
    """Max-norm of T Gamma T^T - Gamma with T = S (+) conj(S).

    ``conjugate=False`` applies the same S on Bob's side instead, the
    control case that EPR correlations are not invariant under.
    """
    g = np.asarray(gamma, dtype=float)
    m = _two_party_modes(g)
    S = np.asarray(S, dtype=float)
    if S.shape != (2 * m, 2 * m):
        raise ValueError(f"rotation must be {2 * m} x {2 * m}, got {S.shape}")
    Sb = conjugate_transform(S) if conjugate else S
    T = np.zeros((4 * m, 4 * m))
    T[: 2 * m, : 2 * m] = S
    T[2 * m :, 2 * m :] = Sb
    return float(np.abs(T @ g @ T.T - g).max())


@dataclass(frozen=True)
class MCSymmetrization:
    mean: np.ndarray
    stderr: np.ndarray
    samples: int


def mc_symmetrize(gamma, samples: int, seed=None, chunk: int = 8192) -> MCSymmetrization:
    """Monte-Carlo average of the per-mode block under random conjugate rotations.

    Each sample draws a Haar S on Alice's m modes, applies S (+) conj(S) by
    congruence and averages the m per-mode 4 x 4 blocks; the result is the
    mean over samples with elementwise standard errors.
    """
    g = np.asarray(gamma, dtype=float)
    m = _two_party_modes(g)
    if samples < 1:
        raise ValueError(f"samples must be >= 1, got {samples}")
    rng = np.random.default_rng(seed)
    d = p_sign_flip(m)
    idx = np.array(
        [[2 * i, 2 * i + 1, 2 * m + 2 * i, 2 * m + 2 * i + 1] for i in range(m)]
    )
    per_sample = np.empty((samples, 4, 4))
    done = 0
    while done < samples:
        c = min(chunk, samples - done)
        S = _realify(haar_unitaries(m, c, rng))
        T = np.zeros((c, 4 * m, 4 * m))
        T[:, : 2 * m, : 2 * m] = S
        T[:, 2 * m :, 2 * m :] = S * d[:, None] * d[None, :]
        out = T @ g @ T.transpose(0, 2, 1)
        blocks = out[:, idx[:, :, None], idx[:, None, :]]
        per_sample[done : done + c] = blocks.mean(axis=1)
        done += c
    # reduce along a contiguous axis so numpy sums pairwise; a strided
    # reduction accumulates rounding linearly in the sample count
    flat = np.ascontiguousarray(per_sample.reshape(samples, 16).T)
    mean = flat.mean(axis=1).reshape(4, 4)
    if samples > 1:
        stderr = flat.std(axis=1, ddof=1).reshape(4, 4) / np.sqrt(samples)
    else:
        stderr = np.full((4, 4), np.inf)
    return MCSymmetrization(mean, stderr, samples)
