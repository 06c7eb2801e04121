"""Acceptance suite: one test per criterion, each with its runtime budget.

Run alone with ``pytest tests/test_acceptance.py -v``; the terminal summary
ends with one PASS/FAIL line per criterion.
"""

import math
import time
from contextlib import contextmanager
from fractions import Fraction

import numpy as np
import pytest
from scipy import stats

from cvsymmetry.classical_definetti import rotate_joint, tv_to_gaussian
from cvsymmetry.combinatorics import multiplicity
from cvsymmetry.definetti_core import (
    DefinettiInstance,
    ReducedVariables,
    exponent_derivative,
    exponent_terms,
    max_ratio_float,
    reduced_distribution,
    sup_ratio_bound,
    trace_distance,
)
from cvsymmetry.haar import haar_orthogonal, haar_unitaries
from cvsymmetry.phase_space import (
    check_conjugate_invariance,
    conjugate_transform,
    epr_covariance,
    epr_multimode,
    haar_symplectic_orthogonal,
    mc_symmetrize,
    orthogonality_residual,
    symmetrize_covariance,
    symplectic_residual,
    unitary_to_symplectic,
)
from cvsymmetry.sim_channel import ChannelModel, channel_check, estimate_channel, estimate_residual

ASYMMETRIC = np.array(
    [
        [1.2, 0.2, 0.5, 0.1],
        [0.2, 0.8, -0.1, -0.3],
        [0.5, -0.1, 1.0, -0.1],
        [0.1, -0.3, -0.1, 1.0],
    ]
)


@contextmanager
def budget(seconds):
    start = time.perf_counter()
    yield
    elapsed = time.perf_counter() - start
    assert elapsed < seconds, f"took {elapsed:.1f} s, budget {seconds} s"


def small_grid():
    for n in range(1, 9):
        for N in range(n + 1, 65):
            for k in range(65):
                yield DefinettiInstance(n, N, k)


@pytest.mark.criterion(1, "exact trace distance n=1, N=2, k=2 is 7/12")
def test_c01_exact_trace_distance():
    with budget(1):
        td = trace_distance(DefinettiInstance(1, 2, 2))
    # oracle: f from multiplicity ratios, g geometric with ratio 1/2 at n = 1,
    # x = 1, and the thermal tail beyond l = k summed in closed form
    f = [Fraction(multiplicity(l, 1) * multiplicity(2 - l, 1), multiplicity(2, 2)) for l in range(3)]
    g = [Fraction(1, 2 ** (l + 1)) for l in range(3)]
    tail = Fraction(1, 2**3)
    oracle = sum(abs(a - b) for a, b in zip(f, g)) + tail
    assert oracle == Fraction(7, 12)
    assert td == oracle


@pytest.mark.criterion(2, "sum_l f(l) = 1 exactly for n <= 8, N <= 64, k <= 64")
def test_c02_exact_normalization():
    bad = []
    with budget(30):
        for inst in small_grid():
            if reduced_distribution(inst).mass() != 1:
                bad.append(inst)
    assert not bad


@pytest.mark.criterion(3, "trace distance <= 2 (sup h - 1) on the same grid, exact")
def test_c03_exact_inequality():
    violations = []
    with budget(60):
        for inst in small_grid():
            if inst.k == 0:
                # f = g = delta_0: both sides vanish
                assert trace_distance(inst) == 0
                continue
            if trace_distance(inst) > sup_ratio_bound(inst):
                violations.append(inst)
    assert not violations


@pytest.mark.criterion(4, "max h against 1/sqrt(1 - n/N) and 1 + n/(2N), x = 1")
def test_c04_asymptotic_sup():
    failures = []
    with budget(120):
        for n in (1, 2, 4):
            N = 256 * n
            while N <= 4096 * n:
                _, h = max_ratio_float(DefinettiInstance(n, N, N))
                target = 1 / math.sqrt(1 - n / N)
                rel = abs(h - target) / (h - 1)
                scaled = 2 * (h - 1) * N / n
                if rel > 0.25 or not 0.75 <= scaled <= 1.5:
                    failures.append(f"n={n} N={N}: rel={rel:.4f} 2(h-1)N/n={scaled:.4f}")
                N *= 2
    assert not failures, "; ".join(failures)


@pytest.mark.criterion(5, "B(xy) = 0, B <= 0 on a z-grid, dB/dz against finite differences")
def test_c05_extremum_structure():
    with budget(1):
        for x in (0.5, 1.0, 2.0):
            for y in (0.1, 0.3, 0.5):
                assert abs(exponent_terms(ReducedVariables(x, y, x * y)).B) <= 1e-10
                zs = np.linspace(0, x, 102)[1:-1]
                for z in zs:
                    rv = ReducedVariables(x, y, float(z))
                    assert exponent_terms(rv).B <= 1e-12
                    step = 1e-6 * x
                    hi = exponent_terms(ReducedVariables(x, y, float(z) + step)).B
                    lo = exponent_terms(ReducedVariables(x, y, float(z) - step)).B
                    fd = (hi - lo) / (2 * step)
                    assert abs(fd - exponent_derivative(rv)) <= 1e-6


@pytest.mark.criterion(6, "trace distance decreasing in N, trace_distance * N/n <= 1.5")
def test_c06_convergence():
    with budget(120):
        for n in (1, 2):
            Ns = [2**e * n for e in range(5, 13)]
            tds = [float(trace_distance(DefinettiInstance(n, N, N))) for N in Ns]
            assert all(a > b for a, b in zip(tds, tds[1:]))
            for N, td in zip(Ns, tds):
                if N >= 256 * n:
                    assert td * N / n <= 1.5


@pytest.mark.criterion(7, "covariance symmetrization closed form and Monte-Carlo rate")
def test_c07_symmetrization():
    with budget(60):
        sym = symmetrize_covariance(ASYMMETRIC)
        assert (sym.X, sym.Y, sym.Z) == pytest.approx((1.0, 1.0, 0.4), abs=1e-15)
        target = sym.matrix()

        mc = mc_symmetrize(ASYMMETRIC, 10**5, seed=7)
        assert np.all(np.abs(mc.mean - target) <= 5 * mc.stderr)

        def rms_error(samples, trials, seed0):
            errs = [np.linalg.norm(mc_symmetrize(ASYMMETRIC, samples, seed0 + i).mean - target) for i in range(trials)]
            return math.sqrt(np.mean(np.square(errs)))

        ratio = rms_error(2500, 60, 1000) / rms_error(10000, 60, 2000)
        assert 2 * 0.7 <= ratio <= 2 * 1.3


@pytest.mark.criterion(8, "EPR invariance under conjugate rotations, non-conjugate control")
def test_c08_epr_invariance():
    with budget(10):
        worst = 0.0
        for m in (1, 2, 4):
            for X in (1.0, 2.0, 5.0):
                gamma = epr_multimode(X, m)
                for seed in range(100):
                    S = haar_symplectic_orthogonal(m, seed=10**4 * m + seed)
                    worst = max(worst, check_conjugate_invariance(gamma, S))
        assert worst <= 1e-10
        theta = np.pi / 4
        R = unitary_to_symplectic(np.array([[np.exp(1j * theta)]]))
        assert check_conjugate_invariance(epr_covariance(2.0), R, conjugate=False) > 0.1


@pytest.mark.criterion(9, "conjugate transform equals the image of the conjugate unitary")
def test_c09_conjugate_identity():
    with budget(5):
        for i in range(100):
            m = 1 + i % 5
            U = haar_unitaries(m, 1, seed=i)[0]
            lhs = conjugate_transform(unitary_to_symplectic(U))
            rhs = unitary_to_symplectic(np.conj(U))
            assert np.abs(lhs - rhs).max() <= 1e-12


@pytest.mark.criterion(10, "channel estimator invariance and 3-sigma coverage of t")
def test_c10_channel():
    with budget(30):
        worst = 0.0
        for seed in range(100):
            rng = np.random.default_rng(seed)
            n = int(rng.integers(2, 300))
            x = rng.normal(0, rng.uniform(0.5, 3), n)
            y = rng.uniform(0, 1) * x + rng.normal(0, rng.uniform(0.1, 2), n)
            rx, ry = rotate_joint(x, y, haar_orthogonal(n, seed=seed + 500))
            worst = max(worst, estimate_residual(estimate_channel(x, y), estimate_channel(rx, ry)))
        assert worst <= 1e-10

        model = ChannelModel(t=0.8, sigma2=0.5, V_A=4.0, n=10**4)
        rows = channel_check(model, runs=200, seed=0)
        assert max(r["invariance_residual"] for r in rows) <= 1e-10
        covered = sum(abs(r["t_hat"] - model.t) <= 3 * r["t_stderr"] for r in rows)
        assert covered / len(rows) >= 0.95


@pytest.mark.criterion(11, "classical sphere marginal TV is O(k/n)")
def test_c11_classical():
    with budget(60):
        ns = [50 * 2**i for i in range(7)]
        tv = {n: tv_to_gaussian(n, 1) for n in ns + [6400]}
        assert all(tv[a] > tv[b] for a, b in zip(ns, ns[1:]))
        assert all(tv[n] * n <= 3 for n in ns)
        assert all(1.6 <= tv[n] / tv[2 * n] <= 2.4 for n in ns if n >= 100)


@pytest.mark.criterion(12, "Haar group invariants and single-mode angle uniformity")
def test_c12_haar():
    with budget(30):
        us = haar_unitaries(1, 10**4, seed=12)
        eye1 = np.ones((1, 1))
        for u in us:
            assert np.abs(u.conj().T @ u - eye1).max() <= 1e-10
        for m in range(1, 6):
            for u in haar_unitaries(m, 200, seed=100 + m):
                assert np.abs(u.conj().T @ u - np.eye(m)).max() <= 1e-10
                S = unitary_to_symplectic(u)
                assert orthogonality_residual(S) <= 1e-10
                assert symplectic_residual(S) <= 1e-10
            for seed in range(50):
                O = haar_orthogonal(m + 1, seed=seed)
                assert np.abs(O.T @ O - np.eye(m + 1)).max() <= 1e-10
        theta = np.mod(np.angle(us[:, 0, 0]), 2 * np.pi) / (2 * np.pi)
        assert stats.kstest(theta, "uniform").pvalue > 0.01
