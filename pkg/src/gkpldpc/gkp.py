"""Gaussian displacement channel and ideal single-mode GKP error correction.

Displacements are expressed in oscillator quadrature units where the code
spacing is sqrt(pi): shifts by even multiples of sqrt(pi) are stabilizers,
odd multiples are logical operators, and the measured syndrome is the
displacement folded into [-sqrt(pi)/2, sqrt(pi)/2).  Q-quadrature shifts
drive logical X errors, P-quadrature shifts drive logical Z errors; the two
quadratures are sampled independently (square lattice).

The syndrome-conditioned logical-error probability (the "analog
information") is the ratio of Gaussian weight at odd-multiple shifts to the
weight at all multiples, evaluated with the largest exponent factored out so
small noise levels do not underflow.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._numba import njit, prange

SQRT_PI = math.sqrt(math.pi)

# Channel log-likelihood ratios are capped here: beyond +-40 the implied
# probability is below double resolution around 0/1, and a finite cap keeps
# the decoder's message arithmetic finite.
LLR_CAP = 40.0

DEFAULT_SERIES_TERMS = 50


@dataclass(frozen=True)
class ChannelConfig:
    """Displacement channel parameters.

    sigma is the per-quadrature standard deviation; series_truncation bounds
    the index |l| in the periodic Gaussian sums.
    """

    sigma: float
    seed: int = 0
    series_truncation: int = DEFAULT_SERIES_TERMS

    def __post_init__(self):
        if not (self.sigma > 0):
            raise ValueError(f"sigma must be positive, got {self.sigma}")
        if self.series_truncation < 1:
            raise ValueError("series_truncation must be >= 1")


@dataclass(frozen=True)
class GkpQubitOutcome:
    """Result of sampling and correcting a single GKP qubit."""

    q_shift: float
    p_shift: float
    q0: float
    p0: float
    logical_x: bool
    logical_z: bool
    p_err_x: float
    p_err_z: float


@dataclass(frozen=True)
class GkpSample:
    """Vectorized outcomes for a block of qubits (arrays of length n)."""

    q_shift: np.ndarray
    p_shift: np.ndarray
    q0: np.ndarray
    p0: np.ndarray
    logical_x: np.ndarray  # uint8
    logical_z: np.ndarray  # uint8
    p_err_x: np.ndarray | None
    p_err_z: np.ndarray | None


def centered_mod(x):
    """Fold x to [-sqrt(pi)/2, sqrt(pi)/2) by subtracting the nearest multiple
    of sqrt(pi); exactly +sqrt(pi)/2 maps to -sqrt(pi)/2."""
    res, _ = fold_displacement(x)
    return res


def fold_displacement(x):
    """Split a displacement into (centered syndrome, logical flag).

    The logical flag is set when the removed multiple of sqrt(pi) is odd,
    i.e. the feedback correction leaves a logical operator behind.
    """
    arr = np.asarray(x, dtype=np.float64)
    mult = np.floor(arr / SQRT_PI + 0.5)
    res = arr - mult * SQRT_PI
    logical = (mult.astype(np.int64) & 1).astype(np.uint8)
    if np.ndim(x) == 0:
        return float(res), bool(logical)
    return res, logical


def _effective_terms(sigma: float, requested: int) -> int:
    """Series length beyond which further terms cannot move the retained sums
    at double precision (dropped terms are < e^-120 of the smallest retained
    sum for syndromes in the fundamental interval)."""
    need = math.ceil((math.sqrt(1.0 + 960.0 * sigma * sigma / math.pi) + 1.0) / 2.0) + 1
    return max(1, min(requested, need))


def analog_error_prob(syndrome, sigma: float, terms: int = DEFAULT_SERIES_TERMS):
    """Probability of a residual logical error given the centered syndrome.

    Ratio of Gaussian likelihood that the true shift sits at an odd multiple
    of sqrt(pi) away from the syndrome to the likelihood over all multiples,
    with both sums truncated to |l| <= terms.  Accepts scalars or arrays.
    """
    if not (sigma > 0):
        raise ValueError(f"sigma must be positive, got {sigma}")
    s = np.asarray(syndrome, dtype=np.float64)
    t = _effective_terms(sigma, terms)
    l = np.arange(-t, t + 1, dtype=np.float64)
    inv = 1.0 / (2.0 * sigma * sigma)
    den_exp = -((s[..., None] - l * SQRT_PI) ** 2) * inv
    num_exp = -((s[..., None] - (2.0 * l + 1.0) * SQRT_PI) ** 2) * inv
    peak = den_exp.max(axis=-1, keepdims=True)  # nearest peak is in the denominator
    num = np.exp(num_exp - peak).sum(axis=-1)
    den = np.exp(den_exp - peak).sum(axis=-1)
    out = num / den
    if np.ndim(syndrome) == 0:
        return float(out)
    return out


def prob_to_llr(p):
    """Log-likelihood ratio ln((1-p)/p), clamped to [-LLR_CAP, LLR_CAP]."""
    arr = np.asarray(p, dtype=np.float64)
    if ((arr < 0) | (arr > 1)).any():
        raise ValueError("probabilities must lie in [0, 1]")
    with np.errstate(divide="ignore"):
        llr = np.log(1.0 - arr) - np.log(arr)
    out = np.clip(llr, -LLR_CAP, LLR_CAP)
    if np.ndim(p) == 0:
        return float(out)
    return out


def no_analog_llr(sigma: float, terms: int = DEFAULT_SERIES_TERMS) -> float:
    """Uniform channel LLR used when the analog syndrome is ignored.

    Log-ratio of the Gaussian weight at even multiples of sqrt(pi) to the
    weight at odd multiples (the syndrome-zero LLR); approaches
    -ln(2) + pi/(2 sigma^2) for small sigma and 0 for large sigma.
    """
    if not (sigma > 0):
        raise ValueError(f"sigma must be positive, got {sigma}")
    l = np.arange(-terms, terms + 1, dtype=np.float64)
    inv = 1.0 / (2.0 * sigma * sigma)
    even_exp = -((2.0 * l * SQRT_PI) ** 2) * inv
    odd_exp = -(((2.0 * l + 1.0) * SQRT_PI) ** 2) * inv
    # log-sum-exp each side so tiny sigma does not underflow the odd sum
    me = even_exp.max()
    mo = odd_exp.max()
    log_even = me + math.log(np.exp(even_exp - me).sum())
    log_odd = mo + math.log(np.exp(odd_exp - mo).sum())
    return float(log_even - log_odd)


def p_of_sigma(sigma: float, terms: int = DEFAULT_SERIES_TERMS) -> float:
    """Probability that one quadrature's shift causes a logical error.

    Mass of the Gaussian on the odd-multiple correction intervals
    [(4l+1) sqrt(pi)/2, (4l+3) sqrt(pi)/2], summed over |l| <= terms via
    error functions.  See p_of_sigma_bound for the single-tail bound.
    """
    if not (sigma > 0):
        raise ValueError(f"sigma must be positive, got {sigma}")
    scale = 1.0 / (sigma * math.sqrt(2.0))
    total = 0.0
    for l in range(-terms, terms + 1):
        a = (4 * l + 1) * SQRT_PI / 2.0
        b = (4 * l + 3) * SQRT_PI / 2.0
        if b <= 0.0:  # reflect onto the positive axis
            a, b = -b, -a
        # difference of complementary tails; avoids cancellation near erf = 1
        total += 0.5 * (math.erfc(a * scale) - math.erfc(b * scale))
    return total


def p_of_sigma_bound(sigma: float) -> float:
    """Two-sided Gaussian tail beyond sqrt(pi)/2: upper bound on p_of_sigma."""
    if not (sigma > 0):
        raise ValueError(f"sigma must be positive, got {sigma}")
    # same argument expression as the sum's l = 0 term, so the bound never
    # dips below the exact value through rounding alone
    scale = 1.0 / (sigma * math.sqrt(2.0))
    return math.erfc(SQRT_PI / 2.0 * scale)


def sample_qubits(
    cfg: ChannelConfig, rng: np.random.Generator, n: int, analog: bool = True
) -> GkpSample:
    """Sample displacement errors and ideal GKP correction for n qubits.

    Draws the n Q-shifts first, then the n P-shifts, from the given
    generator; identical generators therefore reproduce identical samples.
    """
    shifts = rng.normal(0.0, cfg.sigma, size=(2, n))
    q0, logical_x = fold_displacement(shifts[0])
    p0, logical_z = fold_displacement(shifts[1])
    p_err_x = p_err_z = None
    if analog:
        p_err_x = analog_error_prob(q0, cfg.sigma, cfg.series_truncation)
        p_err_z = analog_error_prob(p0, cfg.sigma, cfg.series_truncation)
    return GkpSample(
        q_shift=shifts[0],
        p_shift=shifts[1],
        q0=q0,
        p0=p0,
        logical_x=logical_x,
        logical_z=logical_z,
        p_err_x=p_err_x,
        p_err_z=p_err_z,
    )


def sample_qubit(cfg: ChannelConfig, rng: np.random.Generator) -> GkpQubitOutcome:
    """Sample a single qubit (scalar view of sample_qubits)."""
    s = sample_qubits(cfg, rng, 1, analog=True)
    return GkpQubitOutcome(
        q_shift=float(s.q_shift[0]),
        p_shift=float(s.p_shift[0]),
        q0=float(s.q0[0]),
        p0=float(s.p0[0]),
        logical_x=bool(s.logical_x[0]),
        logical_z=bool(s.logical_z[0]),
        p_err_x=float(s.p_err_x[0]),
        p_err_z=float(s.p_err_z[0]),
    )


@njit(cache=True, parallel=True)
def _analog_llr_kernel(syndromes, sigma, half_range, cap, out):
    """Per-qubit channel LLRs from centered syndromes (flat arrays).

    Fused form of prob_to_llr(analog_error_prob(...)): one pass over the
    shift multiples m in [-half_range, half_range], where the odd-m terms
    form the error likelihood and all terms form the normalization.
    """
    inv = 1.0 / (2.0 * sigma * sigma)
    size = syndromes.shape[0]
    for i in prange(size):
        s = syndromes[i]
        peak = -(s * s) * inv  # m = 0 term dominates for |s| <= sqrt(pi)/2
        num = 0.0
        den = 0.0
        for m in range(-half_range, half_range + 1):
            d = s - m * SQRT_PI
            w = math.exp(-(d * d) * inv - peak)
            den += w
            if m & 1:
                num += w
        p = num / den
        if p <= 0.0:
            out[i] = cap
        else:
            llr = math.log((1.0 - p) / p)
            if llr > cap:
                llr = cap
            elif llr < -cap:
                llr = -cap
            out[i] = llr


def _kernel_half_range(sigma: float, terms: int) -> int:
    """Largest |m| kept by the fused kernel.

    Multiples beyond 0.5 + 6.29 sigma sit more than e^-100 below the sums
    retained for any syndrome in the fundamental interval, so this matches
    the separately truncated sums to double precision.
    """
    return min(2 * terms + 1, math.ceil(0.5 + 6.29 * sigma) + 1)


def analog_llrs(syndromes: np.ndarray, sigma: float, terms: int = DEFAULT_SERIES_TERMS) -> np.ndarray:
    """Vector of prob_to_llr(analog_error_prob(s, sigma)) over an array."""
    if not (sigma > 0):
        raise ValueError(f"sigma must be positive, got {sigma}")
    flat = np.ascontiguousarray(syndromes, dtype=np.float64).reshape(-1)
    out = np.empty_like(flat)
    _analog_llr_kernel(flat, sigma, _kernel_half_range(sigma, terms), LLR_CAP, out)
    return out.reshape(np.shape(syndromes))
