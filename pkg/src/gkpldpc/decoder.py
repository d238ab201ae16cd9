"""Syndrome-based normalized min-sum decoding on Tanner graphs.

Messages live on edges.  The check update is the sign-product /
magnitude-minimum rule scaled by the normalization factor beta, with the
syndrome bit entering as a sign (0 -> +1, 1 -> -1).  The variable update is
the channel LLR plus incoming check messages; hard decisions use the paper
convention sgn(0) = +1, so a tie decodes to "no error".

Two schedules are provided.  Flooding updates every check, then every
variable, once per iteration.  The sequential (column-layered) schedule
sweeps variable nodes in index order; for each one it first refreshes the
incoming check messages from the newest variable messages, then recomputes
the outgoing messages and the decision.  Both check the trial syndrome at
the end of each iteration and stop early on a match.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._numba import njit, prange
from .gf2 import BinaryMatrix
from .gkp import LLR_CAP

SCHEDULES = ("flooding", "sequential")


class TannerGraph:
    """Edge-indexed adjacency of a parity-check matrix.

    Edges are grouped by check; `var_edge` lists every edge a second time,
    grouped by variable, so both node types can walk their neighborhoods.
    """

    __slots__ = (
        "n_vars",
        "n_checks",
        "check_ptr",
        "check_var",
        "edge_check",
        "var_ptr",
        "var_edge",
    )

    def __init__(self, h):
        dense = h.to_dense() if isinstance(h, BinaryMatrix) else np.asarray(h, dtype=np.uint8)
        if dense.ndim != 2:
            raise ValueError("parity-check matrix must be two-dimensional")
        m, n = dense.shape
        check_rows, var_cols = np.nonzero(dense)
        self.n_vars = int(n)
        self.n_checks = int(m)
        self.check_var = var_cols.astype(np.int32)
        self.edge_check = check_rows.astype(np.int32)
        ptr = np.zeros(m + 1, np.int32)
        np.add.at(ptr, check_rows + 1, 1)
        self.check_ptr = np.cumsum(ptr).astype(np.int32)
        vptr = np.zeros(n + 1, np.int32)
        np.add.at(vptr, var_cols + 1, 1)
        self.var_ptr = np.cumsum(vptr).astype(np.int32)
        self.var_edge = np.argsort(var_cols, kind="stable").astype(np.int64)

    @property
    def n_edges(self) -> int:
        return int(self.check_var.shape[0])


@dataclass(frozen=True)
class DecoderConfig:
    beta: float = 0.75
    max_iters: int = 100
    schedule: str = "sequential"

    def __post_init__(self):
        if not (0.0 < self.beta <= 1.0):
            raise ValueError(f"beta must be in (0, 1], got {self.beta}")
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")
        if self.schedule not in SCHEDULES:
            raise ValueError(f"schedule must be one of {SCHEDULES}")


@dataclass(frozen=True)
class DecodeResult:
    estimate: np.ndarray  # uint8 error vector of length n_vars
    converged: bool  # estimate's syndrome equals the input syndrome
    iterations_used: int
    final_llrs: np.ndarray  # per-variable decision values


def _sign(x: float) -> float:
    return -1.0 if x < 0 else 1.0


def cnu(syndrome_bit: int, extrinsic_msgs, beta: float) -> float:
    """Check-node update: beta * sign(syndrome) * prod(signs) * min |msg|."""
    msgs = list(extrinsic_msgs)
    if not msgs:
        raise ValueError("check-node update needs at least one extrinsic message")
    sign = -1.0 if syndrome_bit else 1.0
    mag = math.inf
    for m in msgs:
        sign *= _sign(m)
        mag = min(mag, abs(m))
    return beta * sign * mag


def vnu(channel_llr: float, extrinsic_msgs) -> float:
    """Variable-node update: channel LLR plus incoming check messages."""
    return channel_llr + sum(extrinsic_msgs)


@njit(cache=True)
def _run_flooding(
    check_ptr, check_var, var_ptr, var_edge, edge_check,
    syndrome, lam, beta, max_iters, cap, est, totals,
):
    n_checks = check_ptr.shape[0] - 1
    n_vars = var_ptr.shape[0] - 1
    n_edges = check_var.shape[0]
    m_vc = np.empty(n_edges, np.float64)
    m_cv = np.zeros(n_edges, np.float64)
    for v in range(n_vars):
        for k in range(var_ptr[v], var_ptr[v + 1]):
            m_vc[var_edge[k]] = lam[v]
    for it in range(1, max_iters + 1):
        for c in range(n_checks):
            lo, hi = check_ptr[c], check_ptr[c + 1]
            ssign = -1.0 if syndrome[c] else 1.0
            if hi - lo == 1:
                m_cv[lo] = beta * ssign * cap  # degree-1 check: no extrinsic input
                continue
            prod = ssign
            min1 = math.inf
            min2 = math.inf
            arg1 = -1
            for e in range(lo, hi):
                x = m_vc[e]
                if x < 0.0:
                    prod = -prod
                    x = -x
                if x < min1:
                    min2 = min1
                    min1 = x
                    arg1 = e
                elif x < min2:
                    min2 = x
            for e in range(lo, hi):
                sgn = -1.0 if m_vc[e] < 0.0 else 1.0
                mag = min2 if e == arg1 else min1
                m_cv[e] = beta * prod * sgn * mag
        for v in range(n_vars):
            tot = lam[v]
            for k in range(var_ptr[v], var_ptr[v + 1]):
                tot += m_cv[var_edge[k]]
            totals[v] = tot
            est[v] = 1 if tot < 0.0 else 0
            for k in range(var_ptr[v], var_ptr[v + 1]):
                e = var_edge[k]
                out = tot - m_cv[e]
                if out > cap:
                    out = cap
                elif out < -cap:
                    out = -cap
                m_vc[e] = out
        if _syndrome_matches(check_ptr, check_var, syndrome, est):
            return it, True
    return max_iters, False


@njit(cache=True)
def _run_sequential(
    check_ptr, check_var, var_ptr, var_edge, edge_check,
    syndrome, lam, beta, max_iters, cap, est, totals,
):
    n_checks = check_ptr.shape[0] - 1
    n_vars = var_ptr.shape[0] - 1
    n_edges = check_var.shape[0]
    m_vc = np.empty(n_edges, np.float64)
    m_cv = np.zeros(n_edges, np.float64)
    for v in range(n_vars):
        for k in range(var_ptr[v], var_ptr[v + 1]):
            m_vc[var_edge[k]] = lam[v]
    for it in range(1, max_iters + 1):
        for v in range(n_vars):
            # refresh incoming check messages from the newest variable messages
            for k in range(var_ptr[v], var_ptr[v + 1]):
                e = var_edge[k]
                c = edge_check[e]
                lo, hi = check_ptr[c], check_ptr[c + 1]
                ssign = -1.0 if syndrome[c] else 1.0
                if hi - lo == 1:
                    m_cv[e] = beta * ssign * cap
                    continue
                prod = ssign
                mag = math.inf
                for e2 in range(lo, hi):
                    if e2 == e:
                        continue
                    x = m_vc[e2]
                    if x < 0.0:
                        prod = -prod
                        x = -x
                    if x < mag:
                        mag = x
                m_cv[e] = beta * prod * mag
            tot = lam[v]
            for k in range(var_ptr[v], var_ptr[v + 1]):
                tot += m_cv[var_edge[k]]
            totals[v] = tot
            est[v] = 1 if tot < 0.0 else 0
            for k in range(var_ptr[v], var_ptr[v + 1]):
                e = var_edge[k]
                out = tot - m_cv[e]
                if out > cap:
                    out = cap
                elif out < -cap:
                    out = -cap
                m_vc[e] = out
        if _syndrome_matches(check_ptr, check_var, syndrome, est):
            return it, True
    return max_iters, False


@njit(cache=True)
def _syndrome_matches(check_ptr, check_var, syndrome, est):
    for c in range(check_ptr.shape[0] - 1):
        par = np.uint8(0)
        for e in range(check_ptr[c], check_ptr[c + 1]):
            par ^= est[check_var[e]]
        if par != syndrome[c]:
            return False
    return True


@njit(cache=True, parallel=True)
def _decode_batch_kernel(
    check_ptr, check_var, var_ptr, var_edge, edge_check,
    syndromes, lams, beta, max_iters, cap, sequential,
    est, conv, iters,
):
    n_vars = var_ptr.shape[0] - 1
    for b in prange(syndromes.shape[0]):
        totals = np.empty(n_vars, np.float64)
        if sequential:
            it, ok = _run_sequential(
                check_ptr, check_var, var_ptr, var_edge, edge_check,
                syndromes[b], lams[b], beta, max_iters, cap, est[b], totals,
            )
        else:
            it, ok = _run_flooding(
                check_ptr, check_var, var_ptr, var_edge, edge_check,
                syndromes[b], lams[b], beta, max_iters, cap, est[b], totals,
            )
        iters[b] = it
        conv[b] = 1 if ok else 0


@njit(cache=True, parallel=True)
def _syndromes_kernel(check_ptr, check_var, errors, out):
    for b in prange(errors.shape[0]):
        for c in range(check_ptr.shape[0] - 1):
            par = np.uint8(0)
            for e in range(check_ptr[c], check_ptr[c + 1]):
                par ^= errors[b, check_var[e]]
            out[b, c] = par


def syndromes_of(graph: TannerGraph, errors: np.ndarray) -> np.ndarray:
    """Syndromes H e^T for a batch of error rows (shape (B, n_vars))."""
    errs = np.ascontiguousarray(errors, dtype=np.uint8)
    if errs.ndim == 1:
        errs = errs[None, :]
    out = np.empty((errs.shape[0], graph.n_checks), np.uint8)
    _syndromes_kernel(graph.check_ptr, graph.check_var, errs, out)
    return out


def decode(
    graph: TannerGraph,
    syndrome: np.ndarray,
    channel_llrs: np.ndarray,
    cfg: DecoderConfig,
) -> DecodeResult:
    """Run message passing until the trial syndrome matches or iterations run out."""
    syn = np.ascontiguousarray(syndrome, dtype=np.uint8).reshape(-1)
    lam = np.ascontiguousarray(channel_llrs, dtype=np.float64).reshape(-1)
    if syn.shape[0] != graph.n_checks:
        raise ValueError(f"syndrome length {syn.shape[0]} != {graph.n_checks} checks")
    if lam.shape[0] != graph.n_vars:
        raise ValueError(f"LLR length {lam.shape[0]} != {graph.n_vars} variables")
    if not np.isfinite(lam).all():
        raise ValueError("channel LLRs must be finite")
    est = np.zeros(graph.n_vars, np.uint8)
    totals = np.empty(graph.n_vars, np.float64)
    runner = _run_sequential if cfg.schedule == "sequential" else _run_flooding
    iters, ok = runner(
        graph.check_ptr, graph.check_var, graph.var_ptr, graph.var_edge,
        graph.edge_check, syn, lam, cfg.beta, cfg.max_iters, LLR_CAP,
        est, totals,
    )
    return DecodeResult(
        estimate=est, converged=bool(ok), iterations_used=int(iters), final_llrs=totals
    )


def decode_batch(
    graph: TannerGraph,
    syndromes: np.ndarray,
    channel_llrs: np.ndarray,
    cfg: DecoderConfig,
):
    """Decode a batch of independent trials; returns (estimates, converged, iterations).

    Trials are data-parallel: results do not depend on the worker thread
    count.
    """
    syn = np.ascontiguousarray(syndromes, dtype=np.uint8)
    lam = np.ascontiguousarray(channel_llrs, dtype=np.float64)
    if syn.ndim != 2 or lam.ndim != 2:
        raise ValueError("expected batched (B, m) syndromes and (B, n) LLRs")
    if syn.shape[0] != lam.shape[0]:
        raise ValueError("batch sizes differ")
    if syn.shape[1] != graph.n_checks or lam.shape[1] != graph.n_vars:
        raise ValueError("batch shapes do not match the graph")
    if not np.isfinite(lam).all():
        raise ValueError("channel LLRs must be finite")
    batch = syn.shape[0]
    est = np.zeros((batch, graph.n_vars), np.uint8)
    conv = np.zeros(batch, np.uint8)
    iters = np.zeros(batch, np.int32)
    _decode_batch_kernel(
        graph.check_ptr, graph.check_var, graph.var_ptr, graph.var_edge,
        graph.edge_check, syn, lam, cfg.beta, cfg.max_iters, LLR_CAP,
        cfg.schedule == "sequential", est, conv, iters,
    )
    return est, conv.astype(bool), iters
