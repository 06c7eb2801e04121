"""Gaussian channel data y = t x + z and its joint random-rotation symmetrization."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .haar import apply_haar_orthogonal

CSV_COLUMNS = (
    "seed",
    "n",
    "t",
    "sigma2",
    "t_hat",
    "sigma2_hat",
    "invariance_residual",
    "vA_hat",
    "t_stderr",
)


class DegenerateInputError(ValueError):
    pass


@dataclass(frozen=True)
class ChannelModel:
    t: float
    sigma2: float
    V_A: float
    n: int

    def __post_init__(self):
        if self.sigma2 < 0:
            raise ValueError(f"noise variance must be >= 0, got {self.sigma2}")
        if self.V_A <= 0:
            raise ValueError(f"modulation variance must be > 0, got {self.V_A}")
        if self.n < 1:
            raise ValueError(f"n must be >= 1, got {self.n}")


@dataclass(frozen=True)
class ChannelEstimate:
    t_hat: float
    sigma2_hat: float
    vA_hat: float
    n: int

    @property
    def t_stderr(self) -> float:
        """Standard error of ``t_hat`` given x, sqrt(sigma2_hat / <x, x>)."""
        return math.sqrt(self.sigma2_hat / (self.n * self.vA_hat))

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.t_hat, self.sigma2_hat, self.vA_hat)


def simulate_channel(model: ChannelModel, seed=None) -> tuple[np.ndarray, np.ndarray]:
    rng = np.random.default_rng(seed)
    x = rng.normal(0.0, math.sqrt(model.V_A), model.n)
    z = rng.normal(0.0, math.sqrt(model.sigma2), model.n)
    return x, model.t * x + z


def estimate_channel(x, y) -> ChannelEstimate:
    """Least-squares transmission and noise, written in terms of <x,x>, <x,y>, <y,y>."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape or x.ndim != 1:
        raise ValueError(f"x and y must be vectors of equal length, got {x.shape}, {y.shape}")
    xx = float(x @ x)
    if xx == 0:
        raise DegenerateInputError("x is the zero vector")
    xy = float(x @ y)
    yy = float(y @ y)
    n = x.size
    t_hat = xy / xx
    # ||y - t x||^2 = <y,y> - <x,y>^2/<x,x>, clipped at the rounding floor
    sigma2_hat = max(yy - xy * t_hat, 0.0) / n
    return ChannelEstimate(t_hat, sigma2_hat, xx / n, n)


def estimate_residual(a: ChannelEstimate, b: ChannelEstimate) -> float:
    """Largest relative difference between two estimates' three statistics."""
    return max(
        abs(u - v) / max(1.0, abs(u)) for u, v in zip(a.as_tuple(), b.as_tuple())
    )


def symmetrize_data(x, y, seed=None) -> tuple[np.ndarray, np.ndarray]:
    """Rotate both vectors by one Haar-random R in O(n) and forget R."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape or x.ndim != 1:
        raise ValueError(f"x and y must be vectors of equal length, got {x.shape}, {y.shape}")
    out = apply_haar_orthogonal(np.column_stack([x, y]), seed)
    return out[:, 0], out[:, 1]


def channel_check(model: ChannelModel, runs: int, seed: int = 0) -> list[dict]:
    """One row per run: simulate, estimate, symmetrize, re-estimate.

    Run i uses seed ``seed + i``; its symmetrization draws from an
    independent child stream of the same seed.
    """
    rows = []
    for i in range(runs):
        s = seed + i
        data_seed, rot_seed = np.random.SeedSequence(s).spawn(2)
        x, y = simulate_channel(model, np.random.default_rng(data_seed))
        est = estimate_channel(x, y)
        xs, ys = symmetrize_data(x, y, np.random.default_rng(rot_seed))
        residual = estimate_residual(est, estimate_channel(xs, ys))
        rows.append(
            {
                "seed": s,
                "n": model.n,
                "t": model.t,
                "sigma2": model.sigma2,
                "t_hat": est.t_hat,
                "sigma2_hat": est.sigma2_hat,
                "invariance_residual": residual,
                "vA_hat": est.vA_hat,
                "t_stderr": est.t_stderr,
            }
        )
    return rows
