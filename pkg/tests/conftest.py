"""Shared test fixtures and independent oracles.

The oracles here deliberately avoid the library's own code paths: matrix
checks enumerate combinations, decoding reference values come from brute
force over all error patterns, and the periodic Gaussian sums are evaluated
with mpmath at 60 digits.
"""

from __future__ import annotations

import math

import mpmath as mp
import numpy as np
import pytest

from gkpldpc.construction import builtin_code


@pytest.fixture(scope="session")
def steane():
    return builtin_code("STEANE")


@pytest.fixture(scope="session")
def lp175():
    return builtin_code("LP04-175")


def ml_syndrome_decode(h: np.ndarray, syndrome: np.ndarray, llrs: np.ndarray):
    """Brute-force syndrome decoder: minimize sum of LLRs over set bits.

    Returns (best_pattern, tie_count); only valid for small n.
    """
    n = h.shape[1]
    if n > 20:
        raise ValueError("brute force limited to n <= 20")
    pats = ((np.arange(1 << n)[:, None] >> np.arange(n)) & 1).astype(np.uint8)
    ok = ((pats @ h.T) % 2 == syndrome).all(axis=1)
    costs = (pats @ llrs).astype(float)
    costs[~ok] = np.inf
    best = int(np.argmin(costs))
    ties = int((np.abs(costs - costs[best]) < 1e-9).sum())
    return pats[best], ties


def random_tree_matrix(rng: np.random.Generator, n_vars: int, n_checks: int) -> np.ndarray:
    """Random bipartite tree as a parity-check matrix (cycle-free by construction)."""
    h = np.zeros((n_checks, n_vars), np.uint8)
    have_v = [0]
    have_c: list[int] = []
    pending = [("v", i) for i in range(1, n_vars)] + [("c", j) for j in range(n_checks)]
    rng.shuffle(pending)
    pending = list(pending)
    while pending:
        kind, idx = pending.pop(0)
        if kind == "v":
            if not have_c:
                pending.append((kind, idx))
                continue
            c = have_c[int(rng.integers(len(have_c)))]
            h[c, idx] = 1
            have_v.append(idx)
        else:
            v = have_v[int(rng.integers(len(have_v)))]
            h[idx, v] = 1
            have_c.append(idx)
    return h


SQRT_PI = math.sqrt(math.pi)


def analog_prob_series(s: float, sigma: float, terms: int = 50) -> float:
    """Eq.-style periodic Gaussian ratio at 60 digits."""
    with mp.workdps(60):
        rp = mp.sqrt(mp.pi)
        inv = 1 / (2 * mp.mpf(sigma) ** 2)
        num = mp.fsum(
            mp.e ** (-((mp.mpf(s) - (2 * l + 1) * rp) ** 2) * inv)
            for l in range(-terms, terms + 1)
        )
        den = mp.fsum(
            mp.e ** (-((mp.mpf(s) - l * rp) ** 2) * inv)
            for l in range(-terms, terms + 1)
        )
        return float(num / den)


def no_analog_series(sigma: float, terms: int = 50) -> float:
    """Log-ratio of even to odd periodic Gaussian weights at 60 digits."""
    with mp.workdps(60):
        rp = mp.sqrt(mp.pi)
        inv = 1 / (2 * mp.mpf(sigma) ** 2)
        even = mp.fsum(
            mp.e ** (-((2 * l * rp) ** 2) * inv) for l in range(-terms, terms + 1)
        )
        odd = mp.fsum(
            mp.e ** (-(((2 * l + 1) * rp) ** 2) * inv)
            for l in range(-terms, terms + 1)
        )
        return float(mp.log(even / odd))


def logical_mass_quad(sigma: float, intervals: int = 8) -> float:
    """Gaussian mass on the odd correction bins via direct quadrature."""
    with mp.workdps(40):
        sig = mp.mpf(sigma)
        rp = mp.sqrt(mp.pi)
        pdf = lambda x: mp.e ** (-(x**2) / (2 * sig**2)) / (sig * mp.sqrt(2 * mp.pi))
        total = mp.mpf(0)
        for l in range(-intervals, intervals + 1):
            a = (4 * l + 1) * rp / 2
            b = (4 * l + 3) * rp / 2
            total += mp.quad(pdf, [a, b])
        return float(total)
