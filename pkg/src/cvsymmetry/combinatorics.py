"""Photon-number multiplicities and the thermal entropy function.

Exact values use Python integers; the floating path goes through log-gamma.
The caller picks the path by picking the function, nothing switches silently.
"""

from __future__ import annotations

import math
from itertools import combinations

DEFAULT_ENUMERATION_CAP = 10**6

_LN2 = math.log(2.0)


class EnumerationTooLarge(RuntimeError):
    """Raised when an enumeration would exceed its configured cap."""


def _check_args(k: int, n: int) -> None:
    if n < 1:
        raise ValueError(f"number of modes must be >= 1, got n={n}")
    if k < 0:
        raise ValueError(f"photon number must be >= 0, got k={k}")


def multiplicity(k: int, n: int) -> int:
    """Number of ways to put ``k`` photons into ``n`` modes, C(n+k-1, n-1).

    Args:
        k: total photon number
        n: number of modes

    Returns:
        The exact (arbitrary precision) count.
    """
    _check_args(k, n)
    return math.comb(n + k - 1, n - 1)


def multiplicity_table(k_max: int, n: int) -> list[int]:
    """Return ``[multiplicity(j, n) for j in range(k_max + 1)]``.

    Built with the ratio recurrence a_j = a_{j-1} (n+j-1)/j, which is much
    cheaper than calling ``math.comb`` for every j when k_max is large.
    ``n = 0`` is accepted and gives the indicator of j == 0 (no modes can only
    hold zero photons).
    """
    if k_max < 0:
        return []
    if n == 0:
        return [1] + [0] * k_max
    _check_args(k_max, n)
    out = [1] * (k_max + 1)
    a = 1
    for j in range(1, k_max + 1):
        a = a * (n + j - 1) // j
        out[j] = a
    return out


def enumerate_occupations(
    k: int, n: int, cap: int = DEFAULT_ENUMERATION_CAP
) -> list[tuple[int, ...]]:
    """All n-tuples of non-negative integers summing to k, lexicographic.

    Uses stars and bars: choosing the positions of n-1 bars among k+n-1 slots.
    Raises :class:`EnumerationTooLarge` if there are more than ``cap`` tuples.
    """
    _check_args(k, n)
    count = multiplicity(k, n)
    if count > cap:
        raise EnumerationTooLarge(
            f"{count} occupation tuples for k={k}, n={n} exceeds cap {cap}"
        )
    slots = k + n - 1
    out = []
    for bars in combinations(range(slots), n - 1):
        prev = -1
        occ = []
        for b in bars:
            occ.append(b - prev - 1)
            prev = b
        occ.append(slots - prev - 1)
        out.append(tuple(occ))
    out.sort()
    return out


def log2_multiplicity(k: float, n: float) -> float:
    """log2 of C(n+k-1, n-1) through log-gamma; accepts large arguments."""
    if n < 1:
        raise ValueError(f"number of modes must be >= 1, got n={n}")
    if k < 0:
        raise ValueError(f"photon number must be >= 0, got k={k}")
    return (math.lgamma(n + k) - math.lgamma(n) - math.lgamma(k + 1)) / _LN2


def thermal_entropy(z: float) -> float:
    """Von Neumann entropy in bits of a thermal mode with mean photon number z.

    G(z) = (z+1) log2(z+1) - z log2 z, with 0 log 0 = 0.
    """
    if z < 0:
        raise ValueError(f"mean photon number must be >= 0, got z={z}")
    if z == 0:
        return 0.0
    return (z + 1) * math.log2(z + 1) - z * math.log2(z)


def stirling_log2_multiplicity(x: float, y: float, n: int) -> float:
    """log2 of the large-n form sqrt((1+y/x)/(n x)) * 2^(y n G(x/y)).

    This approximates log2 a_{xn}^{yn}. The exponent is the exact leading
    order; the square-root prefactor is the quoted one, which differs from
    the true Stirling prefactor by an n-independent factor, so the absolute
    log error tends to a constant while the relative error vanishes.
    """
    if x <= 0 or y <= 0:
        raise ValueError(f"x and y must be positive, got x={x}, y={y}")
    if n < 1:
        raise ValueError(f"n must be >= 1, got n={n}")
    return 0.5 * math.log2((1 + y / x) / (n * x)) + y * n * thermal_entropy(x / y)
