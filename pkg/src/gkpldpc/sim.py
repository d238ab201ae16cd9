"""Monte Carlo harness: trials, sweeps, threshold crossings, Hamming bound.

A trial samples displacement errors for every qubit of the outer code,
extracts the syndromes s_Z = Hz e_X^T and s_X = Hx e_Z^T, decodes the X
error pattern on Hz's Tanner graph and the Z pattern on Hx's, and compares
each converged estimate with the true error: a residual inside the
same-type stabilizer row space is a degenerate success, any other residual
is a miscorrection, and a non-converged decode is a failure (treated as a
word error).  A trial counts as one logical error when either quadrature is
unsuccessful, with failure taking precedence over miscorrection in the
per-trial class.

Trials are indexed: trial t of the sigma at index i draws its generator
from (seed, i, t), so results are independent of batching and of the worker
thread count, and sweeps are bit-reproducible from (config, seed).
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from . import _numba
from .construction import CssCode
from .decoder import DecoderConfig, TannerGraph, decode, decode_batch, syndromes_of
from .gkp import (
    LLR_CAP,
    ChannelConfig,
    analog_llrs,
    fold_displacement,
    no_analog_llr,
    p_of_sigma,
)

DEGENERATE_SUCCESS = "degenerate_success"
MISCORRECTION = "miscorrection"
FAILURE = "failure"

DEFAULT_BATCH_SIZE = 256


@dataclass(frozen=True)
class TrialOutcome:
    x_class: str
    z_class: str
    iterations_x: int
    iterations_z: int

    @property
    def is_logical_error(self) -> bool:
        return self.x_class != DEGENERATE_SUCCESS or self.z_class != DEGENERATE_SUCCESS


@dataclass(frozen=True)
class StopRule:
    """Stop a sigma point after min_logical_errors errors or max_trials trials,
    whichever comes first (min_logical_errors=0 disables the error target)."""

    min_logical_errors: int = 100
    max_trials: int = 1_000_000

    def __post_init__(self):
        if self.max_trials < 1:
            raise ValueError("max_trials must be >= 1")
        if self.min_logical_errors < 0:
            raise ValueError("min_logical_errors must be >= 0")


@dataclass(frozen=True)
class SweepRow:
    sigma: float
    trials: int
    logical_errors: int
    failures: int
    miscorrections: int
    iteration_sum: int  # over both decoders, all trials

    @property
    def ler(self) -> float:
        return self.logical_errors / self.trials

    @property
    def failure_frac(self) -> float:
        return self.failures / self.trials

    @property
    def miscorr_frac(self) -> float:
        return self.miscorrections / self.trials

    @property
    def mean_iters(self) -> float:
        return self.iteration_sum / (2 * self.trials)


@dataclass(frozen=True)
class SweepResult:
    rows: tuple[SweepRow, ...]
    config: dict

    def to_csv_text(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(
            ["sigma", "trials", "logical_errors", "ler", "failure_frac",
             "miscorr_frac", "mean_iters"]
        )
        for r in self.rows:
            w.writerow(
                [_fmt(r.sigma), r.trials, r.logical_errors, _fmt(r.ler),
                 _fmt(r.failure_frac), _fmt(r.miscorr_frac), _fmt(r.mean_iters)]
            )
        return buf.getvalue()


def _fmt(x: float) -> str:
    return format(x, ".10g")


def write_sweep(result: SweepResult, csv_path: str | os.PathLike) -> str:
    """Write the CSV plus a JSON sidecar echoing the full config; returns the
    sidecar path."""
    with open(csv_path, "w") as fh:
        fh.write(result.to_csv_text())
    sidecar = os.fspath(csv_path)
    sidecar = sidecar[: -len(".csv")] + ".json" if sidecar.endswith(".csv") else sidecar + ".json"
    with open(sidecar, "w") as fh:
        json.dump(result.config, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return sidecar


def set_workers(n: int) -> None:
    """Set the worker thread count (never changes results, only speed)."""
    if n < 1:
        raise ValueError("worker count must be >= 1")
    if _numba.HAVE_NUMBA:
        _numba.set_num_threads(n)


@lru_cache(maxsize=None)
def _graphs(code: CssCode) -> tuple[TannerGraph, TannerGraph]:
    return TannerGraph(code.hx), TannerGraph(code.hz)


def _classify(converged: bool, estimate: np.ndarray, true_error: np.ndarray, basis) -> str:
    if not converged:
        return FAILURE
    residual = estimate ^ true_error
    if not residual.any():
        return DEGENERATE_SUCCESS
    return DEGENERATE_SUCCESS if basis.contains(residual) else MISCORRECTION


def decode_trial(
    code: CssCode,
    e_x: np.ndarray,
    e_z: np.ndarray,
    llr_x: np.ndarray,
    llr_z: np.ndarray,
    dcfg: DecoderConfig,
) -> TrialOutcome:
    """Decode a forced error pattern (the sampler-free path used by tests).

    X errors are decoded on Hz's graph against s_Z = Hz e_X^T and classified
    against the X-type stabilizer basis (rows of Hx); Z errors dually.
    """
    graph_x, graph_z = _graphs(code)
    e_x = np.ascontiguousarray(e_x, dtype=np.uint8)
    e_z = np.ascontiguousarray(e_z, dtype=np.uint8)
    s_z = syndromes_of(graph_z, e_x)[0]
    s_x = syndromes_of(graph_x, e_z)[0]
    res_x = decode(graph_z, s_z, llr_x, dcfg)
    res_z = decode(graph_x, s_x, llr_z, dcfg)
    return TrialOutcome(
        x_class=_classify(res_x.converged, res_x.estimate, e_x, code.basis_x),
        z_class=_classify(res_z.converged, res_z.estimate, e_z, code.basis_z),
        iterations_x=res_x.iterations_used,
        iterations_z=res_z.iterations_used,
    )


def run_trial(
    code: CssCode,
    channel: ChannelConfig,
    dcfg: DecoderConfig,
    use_analog: bool,
    rng: np.random.Generator,
) -> TrialOutcome:
    """Sample one Monte Carlo trial and decode both quadratures."""
    shifts = rng.normal(0.0, channel.sigma, size=(2, code.n))
    q0, e_x = fold_displacement(shifts[0])
    p0, e_z = fold_displacement(shifts[1])
    if use_analog:
        llr_x = analog_llrs(q0, channel.sigma, channel.series_truncation)
        llr_z = analog_llrs(p0, channel.sigma, channel.series_truncation)
    else:
        lam = _uniform_llr(channel.sigma, channel.series_truncation)
        llr_x = np.full(code.n, lam)
        llr_z = np.full(code.n, lam)
    return decode_trial(code, e_x, e_z, llr_x, llr_z, dcfg)


def _uniform_llr(sigma: float, truncation: int) -> float:
    # the channel cap also applies to the uniform initialization
    return float(np.clip(no_analog_llr(sigma, truncation), -LLR_CAP, LLR_CAP))


def _run_batch(
    code: CssCode,
    sigma: float,
    truncation: int,
    dcfg: DecoderConfig,
    use_analog: bool,
    seed: int,
    sigma_index: int,
    first_trial: int,
    batch: int,
    uniform_llr: float,
):
    """Run trials [first_trial, first_trial + batch) of one sigma point.

    Returns (failures, miscorrections, iteration_sum) for the batch.
    """
    graph_x, graph_z = _graphs(code)
    n = code.n
    q = np.empty((batch, n))
    p = np.empty((batch, n))
    for j in range(batch):
        rng = np.random.default_rng([seed, sigma_index, first_trial + j])
        shifts = rng.normal(0.0, sigma, size=(2, n))
        q[j] = shifts[0]
        p[j] = shifts[1]
    q0, e_x = fold_displacement(q)
    p0, e_z = fold_displacement(p)
    if use_analog:
        llr_x = analog_llrs(q0, sigma, truncation)
        llr_z = analog_llrs(p0, sigma, truncation)
    else:
        llr_x = np.full((batch, n), uniform_llr)
        llr_z = llr_x
    s_z = syndromes_of(graph_z, e_x)
    s_x = syndromes_of(graph_x, e_z)
    est_x, conv_x, it_x = decode_batch(graph_z, s_z, llr_x, dcfg)
    est_z, conv_z, it_z = decode_batch(graph_x, s_x, llr_z, dcfg)

    res_x = est_x ^ e_x
    res_z = est_z ^ e_z
    x_logical = np.zeros(batch, dtype=bool)
    z_logical = np.zeros(batch, dtype=bool)
    for b in np.flatnonzero(conv_x & res_x.any(axis=1)):
        x_logical[b] = not code.basis_x.contains(res_x[b])
    for b in np.flatnonzero(conv_z & res_z.any(axis=1)):
        z_logical[b] = not code.basis_z.contains(res_z[b])
    failed = ~conv_x | ~conv_z
    miscorrected = ~failed & (x_logical | z_logical)
    iteration_sum = int(it_x.sum()) + int(it_z.sum())
    return int(failed.sum()), int(miscorrected.sum()), iteration_sum


def run_sweep(
    code: CssCode,
    sigmas: Sequence[float],
    stop: StopRule = StopRule(),
    dcfg: DecoderConfig = DecoderConfig(),
    use_analog: bool = True,
    seed: int = 0,
    series_truncation: int = 50,
    batch_size: int = DEFAULT_BATCH_SIZE,
    verbose: bool = False,
) -> SweepResult:
    """Aggregate logical error statistics over a grid of noise levels.

    Each sigma uses its own trial-indexed generator stream; the stop rule is
    evaluated at fixed batch boundaries, so reruns with the same config and
    seed reproduce the output byte for byte.
    """
    if not len(sigmas):
        raise ValueError("need at least one sigma")
    if batch_size < 1:
        raise ValueError("batch_size must be >= 1")
    rows = []
    for si, sigma in enumerate(sigmas):
        ChannelConfig(sigma, seed, series_truncation)  # validates sigma
        uniform = 0.0 if use_analog else _uniform_llr(sigma, series_truncation)
        trials = failures = miscorr = iter_sum = 0
        while trials < stop.max_trials:
            batch = min(batch_size, stop.max_trials - trials)
            f, m, isum = _run_batch(
                code, sigma, series_truncation, dcfg, use_analog,
                seed, si, trials, batch, uniform,
            )
            trials += batch
            failures += f
            miscorr += m
            iter_sum += isum
            if stop.min_logical_errors and failures + miscorr >= stop.min_logical_errors:
                break
        row = SweepRow(
            sigma=float(sigma),
            trials=trials,
            logical_errors=failures + miscorr,
            failures=failures,
            miscorrections=miscorr,
            iteration_sum=iter_sum,
        )
        rows.append(row)
        if verbose:
            print(
                f"  sigma={row.sigma:.4g} trials={row.trials} "
                f"ler={row.ler:.4g} fail={row.failures} miscorr={row.miscorrections}",
                flush=True,
            )
    config = {
        "code": code.name,
        "n": code.n,
        "k": code.k,
        "schedule": dcfg.schedule,
        "beta": dcfg.beta,
        "max_iters": dcfg.max_iters,
        "analog": use_analog,
        "seed": seed,
        "series_truncation": series_truncation,
        "min_logical_errors": stop.min_logical_errors,
        "max_trials": stop.max_trials,
        "batch_size": batch_size,
        "sigmas": [float(s) for s in sigmas],
    }
    return SweepResult(rows=tuple(rows), config=config)


# -- threshold estimation ----------------------------------------------------


@dataclass(frozen=True)
class ThresholdEstimate:
    small_code: str
    large_code: str
    crossing: float | None
    bracket: tuple[float, float] | None
    confident: bool
    message: str


# Word error rates this close to 1 are outside the scaling regime (the
# curves of all codes merge), so such grid points carry no crossing signal
# and are excluded from the estimate.
SATURATION_CUTOFF = 0.96


def estimate_threshold(results: Iterable[SweepResult]) -> ThresholdEstimate:
    """Locate the noise level where the two smallest codes' curves cross.

    Below threshold the larger code has the lower logical error rate, above
    it the higher one, so the log ratio d(sigma) = ln LER_small - ln LER_large
    changes sign at the threshold.  The crossing is the root of the
    error-weighted log-linear fit of d across the unsaturated grid points;
    the bracket is the adjacent pair where the measured sign flips (or the
    last unsaturated point and the first saturated one when the flip is
    hidden by saturation).  `confident` is set only when the bracketing
    values clear their binomial error bars; otherwise quote the bracket.
    """
    ordered = sorted(results, key=lambda r: r.config["n"])
    if len(ordered) < 2:
        raise ValueError("need sweeps for at least two codes")
    small, large = ordered[0], ordered[1]
    name_s, name_l = small.config["code"], large.config["code"]
    sig_s = [r.sigma for r in small.rows]
    sig_l = [r.sigma for r in large.rows]
    if not np.allclose(sig_s, sig_l):
        raise ValueError("sweeps use different sigma grids")

    usable = []
    first_saturated = None
    for rs, rl in zip(small.rows, large.rows):
        if rs.logical_errors == 0 or rl.logical_errors == 0:
            continue  # too few trials to see an error at this sigma
        if max(rs.ler, rl.ler) > SATURATION_CUTOFF:
            first_saturated = rs.sigma
            break
        usable.append((rs.sigma, rs, rl))
    if not usable:
        return ThresholdEstimate(
            name_s, name_l, None, None, False,
            "no unsaturated points with observed logical errors",
        )
    sig = np.array([s for s, _, _ in usable])
    d = np.array([math.log(rs.ler) - math.log(rl.ler) for _, rs, rl in usable])
    var = np.array(
        [1.0 / rs.logical_errors + 1.0 / rl.logical_errors for _, rs, rl in usable]
    )
    sd = np.sqrt(var)

    if d[0] < 0.0:
        return ThresholdEstimate(
            name_s, name_l, None, None, False,
            "curves are already crossed at the smallest sigma",
        )

    flip = None  # index of the first measured sign change
    for i in range(len(usable) - 1):
        if d[i] >= 0.0 and d[i + 1] < 0.0:
            flip = i
            break
    if flip is None:
        if first_saturated is None:
            return ThresholdEstimate(
                name_s, name_l, None, None, False,
                "curves do not cross on the sigma grid",
            )
        # still ordered at the last unsaturated point; the flip happens
        # somewhere before the curves merge
        bracket = (float(sig[-1]), float(first_saturated))
        confident = False
    else:
        bracket = (float(sig[flip]), float(sig[flip + 1]))
        confident = bool(d[flip] > sd[flip] and -d[flip + 1] > sd[flip + 1])

    if len(usable) == 1:
        crossing = 0.5 * (bracket[0] + bracket[1])
        return ThresholdEstimate(
            name_s, name_l, crossing, bracket, False,
            "single unsaturated point; crossing taken as the bracket midpoint",
        )

    w = 1.0 / var
    xbar = (w * sig).sum() / w.sum()
    dbar = (w * d).sum() / w.sum()
    sxx = (w * (sig - xbar) ** 2).sum()
    sxy = (w * (sig - xbar) * (d - dbar)).sum()
    if sxy < 0.0 and sxx > 0.0:
        slope = sxy / sxx
        crossing = float(xbar - dbar / slope)
        lo = float(sig[0])
        hi = float(first_saturated if first_saturated is not None else sig[-1])
        crossing = min(max(crossing, lo), hi)
    elif flip is not None:
        # degenerate fit; fall back to interpolating the bracketing pair
        crossing = float(
            sig[flip]
            + d[flip] * (sig[flip + 1] - sig[flip]) / (d[flip] - d[flip + 1])
        )
    else:
        return ThresholdEstimate(
            name_s, name_l, None, bracket, False,
            "log-ratio does not decrease with sigma; no usable crossing",
        )
    return ThresholdEstimate(
        name_s, name_l, crossing, bracket, confident,
        "crossing located" if confident
        else "error bars overlap across the bracket; quote the bracket",
    )


# -- CSS Hamming bound -------------------------------------------------------


def css_hamming_rate(p: float) -> float:
    """Rate bound 1 - 2 h2(p) for non-degenerate CSS codes at error rate p."""
    if p < 0.0 or p > 0.5:
        raise ValueError(f"p must lie in [0, 1/2], got {p}")
    if p == 0.0:
        return 1.0
    h2 = -p * math.log2(p) - (1.0 - p) * math.log2(1.0 - p)
    return 1.0 - 2.0 * h2


def css_hamming_sigma(rate: float, tol: float = 1e-4) -> float:
    """Noise level at which the CSS Hamming bound equals the given rate.

    Solves css_hamming_rate(p_of_sigma(sigma)) == rate by bisection on
    sigma in (0.01, 1.0).
    """
    if not (0.0 < rate < 1.0):
        raise ValueError(f"rate must lie in (0, 1), got {rate}")
    lo, hi = 0.01, 1.0

    def f(sig: float) -> float:
        return css_hamming_rate(min(p_of_sigma(sig), 0.5)) - rate

    flo, fhi = f(lo), f(hi)
    if flo < 0.0 or fhi > 0.0:
        raise ValueError(f"no root in ({lo}, {hi}) for rate {rate}")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if f(mid) >= 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)
