"""Classical orthogonally invariant sequences.

A uniform point on the sphere of radius sqrt(n) in R^n has first-k marginal
density proportional to (1 - |u|^2/n)^((n-k-2)/2); it approaches the standard
normal on R^k with variation distance of order k/n. Orthogonally invariant
vectors are radius times uniform direction, and chi-distributed radii give
i.i.d. normals.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize, special

ORTHOGONALITY_TOL = 1e-10


def _check_marginal(n: int, k: int) -> None:
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if k > n - 2:
        raise ValueError(f"need k <= n - 2, got n={n}, k={k}")


def _log_norm(n: int, k: int) -> float:
    """Log normalizer of the radius-sqrt(n) sphere marginal on R^k."""
    return (
        math.lgamma(n / 2)
        - math.lgamma((n - k) / 2)
        - (k / 2) * math.log(math.pi)
        - (k / 2) * math.log(n)
    )


def sphere_marginal_density(n: int, k: int, u) -> float:
    """Density of the first k coordinates of a uniform point on the sqrt(n)-sphere."""
    _check_marginal(n, k)
    u = np.atleast_1d(np.asarray(u, dtype=float))
    if u.shape != (k,):
        raise ValueError(f"u must have {k} coordinate(s), got shape {u.shape}")
    s = float(u @ u)
    if s >= n:
        return 0.0
    expo = (n - k - 2) / 2
    return math.exp(_log_norm(n, k) + expo * math.log1p(-s / n))


def _log_ratio(n: int, k: int, s: float) -> float:
    """log(sphere density / standard normal density) at squared radius s."""
    return (
        _log_norm(n, k)
        + (k / 2) * math.log(2 * math.pi)
        + ((n - k - 2) / 2) * math.log1p(-s / n)
        + s / 2
    )


def tv_to_gaussian(n: int, k: int) -> float:
    """Total variation distance between the sphere marginal and N(0, I_k).

    Both laws are radial, so the distance reduces to the one between the laws
    of s = |u|^2: s/n ~ Beta(k/2, (n-k)/2) against chi-square(k). Their log
    density ratio is concave in s with its peak at s = k + 2, so the sphere
    law dominates on one interval (s1, s2) and the distance is the difference
    of the two probabilities of that interval, evaluated with incomplete
    beta and gamma functions.
    """
    if k not in (1, 2):
        raise ValueError(f"only k in {{1, 2}} is supported, got k={k}")
    if n < k + 3:
        raise ValueError(f"need n >= k + 3, got n={n}, k={k}")
    peak = float(k + 2)
    if _log_ratio(n, k, peak) <= 0:
        return 0.0
    if _log_ratio(n, k, 0.0) >= 0:
        s1 = 0.0
    else:
        s1 = optimize.brentq(lambda s: _log_ratio(n, k, s), 0.0, peak, xtol=1e-14, rtol=1e-15)
    # the log ratio goes to -inf at s = n; bracket just inside
    upper = n * (1 - 1e-12)
    s2 = optimize.brentq(lambda s: _log_ratio(n, k, s), peak, upper, xtol=1e-14, rtol=1e-15)
    a, b = k / 2, (n - k) / 2
    p_sphere = special.betainc(a, b, s2 / n) - special.betainc(a, b, s1 / n)
    p_gauss = special.gammainc(k / 2, s2 / 2) - special.gammainc(k / 2, s1 / 2)
    return float(p_sphere - p_gauss)


# -- sampling -----------------------------------------------------------------


@dataclass(frozen=True)
class RadiusLaw:
    """Law of the radius of an orthogonally invariant vector.

    kind is one of:
      ``fixed``: radius equal to ``scales[0]``;
      ``chi``: chi(n) times ``scales[0]``, giving i.i.d. N(0, scale^2) coordinates;
      ``mixture``: chi(n) times a scale drawn from ``scales`` with ``weights``.
    """

    kind: str
    scales: tuple = (1.0,)
    weights: tuple = field(default=(1.0,))

    def __post_init__(self):
        if self.kind not in ("fixed", "chi", "mixture"):
            raise ValueError(f"unknown radius law {self.kind!r}")
        if not self.scales or any(s < 0 for s in self.scales):
            raise ValueError("scales must be non-negative and non-empty")
        if self.kind == "mixture":
            if len(self.weights) != len(self.scales):
                raise ValueError("need one weight per scale")
            if any(w < 0 for w in self.weights) or not math.isclose(sum(self.weights), 1.0):
                raise ValueError("mixture weights must be non-negative and sum to 1")

    @classmethod
    def fixed(cls, r: float) -> "RadiusLaw":
        return cls("fixed", (float(r),), (1.0,))

    @classmethod
    def chi(cls, sigma: float = 1.0) -> "RadiusLaw":
        return cls("chi", (float(sigma),), (1.0,))

    @classmethod
    def mixture(cls, scales, weights) -> "RadiusLaw":
        return cls("mixture", tuple(map(float, scales)), tuple(map(float, weights)))

    def second_moment(self, n: int) -> float:
        """E r^2."""
        if self.kind == "fixed":
            return self.scales[0] ** 2
        return n * sum(w * s * s for s, w in zip(self.scales, self.weights))

    def sample(self, n: int, count: int, rng: np.random.Generator) -> np.ndarray:
        if self.kind == "fixed":
            return np.full(count, self.scales[0])
        r = np.sqrt(rng.chisquare(n, size=count))
        if self.kind == "chi":
            return r * self.scales[0]
        pick = rng.choice(len(self.scales), size=count, p=np.asarray(self.weights))
        return r * np.asarray(self.scales)[pick]


def sample_orthogonally_invariant(n: int, radius_law: RadiusLaw, count: int, seed=None) -> np.ndarray:
    """``count`` x ``n`` rows, each a radius times a uniform unit direction."""
    if not isinstance(radius_law, RadiusLaw):
        raise ValueError(f"radius_law must be a RadiusLaw, got {type(radius_law).__name__}")
    if n < 1 or count < 0:
        raise ValueError(f"invalid shape n={n}, count={count}")
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((count, n))
    direction = g / np.linalg.norm(g, axis=1, keepdims=True)
    return radius_law.sample(n, count, rng)[:, None] * direction


def rotate_joint(x, y, R):
    """Apply the same orthogonal R to both data vectors."""
    R = np.asarray(R, dtype=float)
    if R.ndim != 2 or R.shape[0] != R.shape[1]:
        raise ValueError(f"R must be square, got shape {R.shape}")
    if np.abs(R.T @ R - np.eye(R.shape[0])).max() > ORTHOGONALITY_TOL:
        raise ValueError("R is not orthogonal")
    return R @ np.asarray(x, dtype=float), R @ np.asarray(y, dtype=float)


def sweep(ns, ks) -> list[dict]:
    """Rows (n, k, tv, tv*n/k) sorted by (n, k)."""
    rows = []
    for n in sorted(set(ns)):
        for k in sorted(set(ks)):
            tv = tv_to_gaussian(n, k)
            rows.append({"n": n, "k": k, "tv": tv, "tv_n_over_k": tv * n / k})
    rows.sort(key=lambda r: (r["n"], r["k"]))
    return rows

