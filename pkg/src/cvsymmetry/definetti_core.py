"""De Finetti theorem for orthogonally invariant bosonic states.

The reduced state of an extremal N-mode state with k photons and the n-mode
thermal state with k/N photons per mode are both mixtures of the n-mode
extremal states, so their trace distance is the variation distance between
two distributions over the total photon number l:

    f(l) = a_l^n a_{k-l}^{N-n} / a_k^N
    g(l) = a_l^n x^l / (1+x)^(n+l),     x = k/N

Everything on small grids is done in exact rational arithmetic. For large
N there is a log-gamma path (functions with a ``_float`` suffix).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple, Union

import numpy as np
from scipy import stats
from scipy.special import gammaln

from .combinatorics import multiplicity, multiplicity_table, thermal_entropy

Number = Union[Fraction, float]


@dataclass(frozen=True)
class DefinettiInstance:
    """Retained modes ``n`` out of ``N > n`` total, total photon number ``k``."""

    n: int
    N: int
    k: int

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"n must be >= 1, got {self.n}")
        if self.N <= self.n:
            raise ValueError(f"N must be > n, got N={self.N}, n={self.n}")
        if self.k < 0:
            raise ValueError(f"k must be >= 0, got {self.k}")

    @property
    def x(self) -> Fraction:
        """Mean photon number per mode, k/N."""
        return Fraction(self.k, self.N)

    @property
    def y(self) -> Fraction:
        return Fraction(self.n, self.N)


@dataclass(frozen=True)
class OccupationDistribution:
    """Probability mass over total photon number l = 0, 1, ..., len(weights)-1.

    ``tail_bound`` bounds the mass beyond the stored range; it is zero when
    the stored weights are the full support.
    """

    weights: tuple
    tail_bound: Number = 0

    def __getitem__(self, l: int) -> Number:
        if l < 0:
            raise IndexError(l)
        if l >= len(self.weights):
            return type(self.weights[0])(0) if self.weights else 0
        return self.weights[l]

    def __len__(self):
        return len(self.weights)

    @property
    def support_max(self) -> int:
        """Largest stored l with nonzero weight."""
        for l in range(len(self.weights) - 1, -1, -1):
            if self.weights[l] != 0:
                return l
        return -1

    @property
    def is_exact(self) -> bool:
        return all(isinstance(w, (int, Fraction)) for w in self.weights)

    def mass(self) -> Number:
        if self.is_exact:
            return sum(self.weights, Fraction(0))
        return math.fsum(self.weights)


def reduced_distribution(inst: DefinettiInstance) -> OccupationDistribution:
    """Exact f(l) for l = 0..k; sums to one by the Vandermonde identity."""
    n, N, k = inst.n, inst.N, inst.k
    a_n = multiplicity_table(k, n)
    a_rest = multiplicity_table(k, N - n)
    total = multiplicity(k, N)
    weights = tuple(Fraction(a_n[l] * a_rest[k - l], total) for l in range(k + 1))
    return OccupationDistribution(weights)


def _as_exact(x) -> Fraction | None:
    if isinstance(x, (int, Fraction)) and not isinstance(x, bool):
        return Fraction(x)
    return None


def thermal_distribution(n: int, x, l_max: int) -> OccupationDistribution:
    """Photon-number distribution g(l) of n thermal modes, x photons per mode.

    Weights are exact fractions when ``x`` is an int or Fraction and floats
    otherwise. Past the cutoff the ratio g(l+1)/g(l) = x/(1+x) (l+n)/(l+1)
    is non-increasing, so once it drops below one the tail is dominated by a
    geometric series starting at g(l_max). If it has not dropped below one
    yet, the bound falls back to 1 - (stored mass).
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if l_max < 0:
        raise ValueError(f"l_max must be >= 0, got {l_max}")
    if x < 0:
        raise ValueError(f"mean photon number must be >= 0, got x={x}")
    a = multiplicity_table(l_max, n)
    xe = _as_exact(x)
    if xe is not None:
        p, q = xe.numerator, xe.denominator
        s = p + q
        weights = tuple(
            Fraction(a[l] * p**l * q**n, s ** (n + l)) for l in range(l_max + 1)
        )
        ratio = Fraction(p, s) * Fraction(l_max + n, l_max + 1)
        if ratio < 1:
            tail = weights[l_max] * ratio / (1 - ratio)
        else:
            tail = 1 - sum(weights, Fraction(0))
        return OccupationDistribution(weights, tail)

    x = float(x)
    if x == 0.0:
        weights = (1.0,) + (0.0,) * l_max
        return OccupationDistribution(weights, 0.0)
    l = np.arange(l_max + 1)
    logw = _log_multiplicity(l, n) + l * math.log(x) - (n + l) * math.log1p(x)
    weights = tuple(float(w) for w in np.exp(logw))
    ratio = x / (1 + x) * (l_max + n) / (l_max + 1)
    if ratio < 1:
        tail = weights[l_max] * ratio / (1 - ratio)
    else:
        tail = max(0.0, 1.0 - math.fsum(weights))
    return OccupationDistribution(weights, tail)


def _exact_terms(inst: DefinettiInstance):
    """Integers F, G, D with f(l) = F[l]/D and g(l) = G[l]/D for l <= k.

    Writing x = p/q in lowest terms,
        D    = a_k^N (p+q)^(n+k)
        F[l] = a_l^n a_{k-l}^{N-n} (p+q)^(n+k)
        G[l] = a_l^n p^l q^n (p+q)^(k-l) a_k^N
    """
    n, N, k = inst.n, inst.N, inst.k
    x = inst.x
    p, q = x.numerator, x.denominator
    s = p + q
    a_n = multiplicity_table(k, n)
    a_rest = multiplicity_table(k, N - n)
    a_total = multiplicity(k, N)
    s_full = s ** (n + k)
    qn_total = q**n * a_total

    s_pows = [1] * (k + 1)
    for j in range(1, k + 1):
        s_pows[j] = s_pows[j - 1] * s
    F = [0] * (k + 1)
    G = [0] * (k + 1)
    p_pow = 1
    for l in range(k + 1):
        F[l] = a_n[l] * a_rest[k - l] * s_full
        G[l] = a_n[l] * p_pow * s_pows[k - l] * qn_total
        p_pow *= p
    return F, G, a_total * s_full


def likelihood_ratio(inst: DefinettiInstance, l: int) -> Fraction:
    """h(l) = f(l)/g(l), exactly. Zero for l > k, where f vanishes."""
    if inst.k == 0:
        raise ValueError("likelihood ratio is undefined for k = 0 (x = 0)")
    if l < 0:
        raise ValueError(f"l must be >= 0, got {l}")
    n, N, k = inst.n, inst.N, inst.k
    if l > k:
        return Fraction(0)
    x = inst.x
    p, q = x.numerator, x.denominator
    rest = multiplicity(k - l, N - n) if N > n else int(k == l)
    return Fraction(rest * (p + q) ** (n + l), multiplicity(k, N) * p**l * q**n)


def trace_distance(inst: DefinettiInstance) -> Fraction:
    """Exact sum over all l of |f(l) - g(l)|.

    The tail l > k, where f is zero, contributes 1 - sum_{l<=k} g(l).
    """
    F, G, D = _exact_terms(inst)
    total = D - sum(G)
    for Fl, Gl in zip(F, G):
        total += abs(Fl - Gl)
    return Fraction(total, D)


def _max_ratio(inst: DefinettiInstance) -> tuple[int, Fraction]:
    if inst.k == 0:
        raise ValueError("sup of the likelihood ratio is undefined for k = 0")
    n, N, k = inst.n, inst.N, inst.k
    # h(l+1)/h(l) = (k-l)(p+q) / (p (N-n-1+k-l)) is non-increasing in l,
    # so h is unimodal; stop at the first step that does not increase it
    x = inst.x
    p, s = x.numerator, x.numerator + x.denominator
    best = 0
    while best < k and (k - best) * s > p * (N - n - 1 + k - best):
        best += 1
    return best, likelihood_ratio(inst, best)


def sup_ratio_bound(inst: DefinettiInstance) -> Fraction:
    """2 (max_l h(l) - 1), an upper bound on :func:`trace_distance`."""
    _, h = _max_ratio(inst)
    return 2 * (h - 1)


def argmax_ratio(inst: DefinettiInstance) -> int:
    """Smallest l in [0, k] attaining the maximum of h."""
    l, _ = _max_ratio(inst)
    return l


# -- log-gamma path -----------------------------------------------------------


def _log_multiplicity(k, n):
    """Natural log of a_k^n, vectorized over k; n = 0 gives log [k == 0]."""
    k = np.asarray(k, dtype=float)
    if n == 0:
        return np.where(k == 0, 0.0, -np.inf)
    return gammaln(n + k) - gammaln(n) - gammaln(k + 1)


def log_likelihood_ratios(inst: DefinettiInstance) -> np.ndarray:
    """Natural log of h(l) for l = 0..k, via log-gamma."""
    if inst.k == 0:
        raise ValueError("likelihood ratio is undefined for k = 0 (x = 0)")
    n, N, k = inst.n, inst.N, inst.k
    x = k / N
    l = np.arange(k + 1)
    return (
        _log_multiplicity(k - l, N - n)
        - _log_multiplicity(k, N)
        + (n + l) * math.log1p(x)
        - l * math.log(x)
    )


def max_ratio_float(inst: DefinettiInstance) -> tuple[int, float]:
    """(argmax, max h) on the log-gamma path."""
    logh = log_likelihood_ratios(inst)
    l = int(np.argmax(logh))
    return l, float(np.exp(logh[l]))


def trace_distance_float(inst: DefinettiInstance) -> float:
    """Floating-point trace distance; the l > k tail uses the negative-binomial survival function."""
    n, N, k = inst.n, inst.N, inst.k
    if k == 0:
        return 0.0
    x = k / N
    l = np.arange(k + 1)
    log_an = _log_multiplicity(l, n)
    f = np.exp(log_an + _log_multiplicity(k - l, N - n) - _log_multiplicity(k, N))
    g = np.exp(log_an + l * math.log(x) - (n + l) * math.log1p(x))
    tail = stats.nbinom.sf(k, n, 1.0 / (1.0 + x))
    return math.fsum(np.abs(f - g)) + float(tail)


# -- asymptotic analysis ------------------------------------------------------


@dataclass(frozen=True)
class ReducedVariables:
    """x = k/N, y = n/N, z = l/N; t = (1-y)/(x-z) is derived."""

    x: float
    y: float
    z: float

    def __post_init__(self):
        if not 0 < self.y < 1:
            raise ValueError(f"y must lie in (0, 1), got {self.y}")
        if self.x <= 0:
            raise ValueError(f"x must be > 0, got {self.x}")
        if not 0 <= self.z < self.x:
            raise ValueError(f"need 0 <= z < x, got z={self.z}, x={self.x}")

    @classmethod
    def from_instance(cls, inst: DefinettiInstance, l: int) -> "ReducedVariables":
        return cls(inst.k / inst.N, inst.n / inst.N, l / inst.N)

    @property
    def t(self) -> float:
        return (1 - self.y) / (self.x - self.z)


class AsymptoticTerms(NamedTuple):
    A: float
    B: float


def exponent_terms(rv: ReducedVariables) -> AsymptoticTerms:
    """Prefactor A and exponent B (bits per mode) with h(zN) ~ A 2^(N B)."""
    x, y, z, t = rv.x, rv.y, rv.z, rv.t
    A = math.sqrt(t * x * (1 + t) / ((1 - y) * (1 + 1 / x)))
    B = (
        (1 - y) * thermal_entropy(1 / t)
        - thermal_entropy(x)
        + (y + z) * math.log2(1 + x)
        - z * math.log2(x)
    )
    return AsymptoticTerms(A, B)


def exponent_derivative(rv: ReducedVariables) -> float:
    """dB/dz = log2(1 + 1/x) - log2(1 + t), in the same units as B."""
    return math.log2(1 + 1 / rv.x) - math.log2(1 + rv.t)


class AsymptoticSup(NamedTuple):
    value: float
    first_order: float


def asymptotic_sup(n: int, N: int) -> AsymptoticSup:
    """Leading-order sup of h: 1/sqrt(1 - n/N), and its expansion 1 + n/(2N)."""
    if n < 0:
        raise ValueError(f"n must be >= 0, got {n}")
    if N <= n:
        raise ValueError(f"need N > n, got N={N}, n={n}")
    y = n / N
    return AsymptoticSup(1 / math.sqrt(1 - y), 1 + y / 2)


# -- sweeps -------------------------------------------------------------------

SWEEP_COLUMNS = (
    "n",
    "N",
    "k",
    "trace_distance",
    "sup_bound",
    "argmax",
    "asymptote",
    "bound_times_N_over_n",
)


def sweep_row(inst: DefinettiInstance) -> dict:
    """One exact sweep record. ``sup_bound`` and ``argmax`` are None for k = 0."""
    row = {"n": inst.n, "N": inst.N, "k": inst.k}
    row["trace_distance"] = trace_distance(inst)
    if inst.k > 0:
        l, h = _max_ratio(inst)
        bound = 2 * (h - 1)
        row["sup_bound"] = bound
        row["argmax"] = l
        row["bound_times_N_over_n"] = bound * Fraction(inst.N, inst.n)
    else:
        row["sup_bound"] = row["argmax"] = row["bound_times_N_over_n"] = None
    row["asymptote"] = asymptotic_sup(inst.n, inst.N).value
    return row


def sweep(instances) -> list[dict]:
    """Rows for each instance, sorted by (n, N, k)."""
    ordered = sorted(set(instances), key=lambda i: (i.n, i.N, i.k))
    return [sweep_row(inst) for inst in ordered]
