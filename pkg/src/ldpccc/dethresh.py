"""Protograph density evolution on the erasure channel and threshold search.

Tracks per-edge-class erasure probabilities of the flooding message-passing
recursion (the erasure-channel specialization of protograph EXIT analysis):

    CN -> VN:  r = 1 - prod over other incident copies of (1 - q)
    VN -> CN:  q = eps_v * prod over other incident copies of r
    a-posteriori erasure at a VN:  eps_v * prod over all incident copies of r

The BP threshold is the supremum channel erasure rate at which every
a-posteriori erasure is driven to (numerically) zero.  Windowed thresholds
apply the same recursion to a window sub-protograph: columns targeted by
earlier window positions enter at erasure delta, everything else at the
channel rate, and success only demands the targeted columns reach delta.

delta = 0 is treated window-wide: success means every connected window
column's erasure probability falls below a numerical zero (ZERO_TOL), far
beneath anything a non-converging window can sustain.  Zero-target decoding
keeps nothing unresolved inside the window, so its threshold is set by the
weakest window structure, e.g. a degree-1 pair sharing a check scores a
null threshold.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import _dekernels
from .protograph import (COL_LEFT, BaseMatrix, Ensemble, WindowProtograph,
                         base_matrix, window_bounds, window_subprotograph)

DEFAULT_MAX_ITER = 50_000
DEFAULT_FTOL = 1e-14
DEFAULT_SUCCESS_TOL = 1e-12
DEFAULT_TOL_EPS = 1e-5
# Numerical zero for the delta = 0 criterion: erasure probabilities that a
# window can sustain without converging sit many orders of magnitude above
# this at any channel rate the bisection can resolve.
ZERO_TOL = 1e-40


@dataclass(frozen=True, eq=False)
class DEGraph:
    """Edge-class view of a base matrix plus per-variable channel erasures."""

    n_checks: int
    n_vars: int
    evar: np.ndarray      # per edge class: variable index
    echk: np.ndarray      # per edge class: check index
    emult: np.ndarray     # per edge class: multiplicity b >= 1
    ce_ptr: np.ndarray    # check -> edge ids (CSR layout)
    ce_eid: np.ndarray
    ve_ptr: np.ndarray    # var -> edge ids
    ve_eid: np.ndarray
    eps: np.ndarray       # per variable channel erasure probability


def de_graph(bm: BaseMatrix, eps) -> DEGraph:
    """Build the edge-class structure; ``eps`` is scalar or per-column."""
    m = bm.entries
    chk, var = np.nonzero(m)
    mult = m[chk, var].astype(np.int64)
    chk = chk.astype(np.int64)
    var = var.astype(np.int64)
    E = chk.shape[0]
    eps_arr = np.broadcast_to(np.asarray(eps, dtype=np.float64),
                              (bm.cols,)).copy()
    if (eps_arr < 0).any() or (eps_arr > 1).any():
        raise ValueError("eps must lie in [0, 1]")
    ce_ptr = np.zeros(bm.rows + 1, dtype=np.int64)
    np.add.at(ce_ptr, chk + 1, 1)
    np.cumsum(ce_ptr, out=ce_ptr)
    ce_eid = np.argsort(chk, kind="stable").astype(np.int64)
    ve_ptr = np.zeros(bm.cols + 1, dtype=np.int64)
    np.add.at(ve_ptr, var + 1, 1)
    np.cumsum(ve_ptr, out=ve_ptr)
    ve_eid = np.argsort(var, kind="stable").astype(np.int64)
    assert E == ce_ptr[-1] == ve_ptr[-1]
    return DEGraph(bm.rows, bm.cols, var, chk, mult, ce_ptr, ce_eid,
                   ve_ptr, ve_eid, eps_arr)


@dataclass(frozen=True, eq=False)
class DEResult:
    erasure: np.ndarray   # per-variable a-posteriori erasure probability
    iterations: int
    converged: bool


def _solve(graph: DEGraph, eps: np.ndarray, tgt: np.ndarray,
           success_tol: float, ftol: float, max_iter: int):
    E = graph.evar.shape[0]
    q = np.empty(E)
    r = np.empty(E)
    apost = np.empty(graph.n_vars)
    status, iters = _dekernels.de_run(
        graph.ce_ptr, graph.ce_eid, graph.ve_ptr, graph.ve_eid,
        graph.evar, graph.emult, eps, tgt,
        success_tol, ftol, max_iter, q, r, apost)
    return status, iters, apost


def de_fixed_point(graph: DEGraph, max_iter: int = DEFAULT_MAX_ITER,
                   tol: float = DEFAULT_FTOL) -> DEResult:
    """Run the recursion to its fixed point from the channel state."""
    tgt = np.empty(0, dtype=np.int64)
    status, iters, apost = _solve(graph, graph.eps, tgt, -1.0, tol, max_iter)
    return DEResult(apost, iters, status == _dekernels.STALLED)


def de_step(graph: DEGraph, q: np.ndarray):
    """One CN+VN update from message state q.  Returns (r, q_next, apost).

    Plain-numpy companion to the compiled loop; used for step-level
    properties (monotonicity of the map, trajectory monotonicity).
    """
    E = graph.evar.shape[0]
    q = np.asarray(q, dtype=np.float64)
    if q.shape != (E,):
        raise ValueError("q must have one entry per edge class")
    r = np.empty(E)
    for e in range(E):
        c = graph.echk[e]
        prod = 1.0
        for e2 in graph.ce_eid[graph.ce_ptr[c]:graph.ce_ptr[c + 1]]:
            b = graph.emult[e2] - 1 if e2 == e else graph.emult[e2]
            prod *= (1.0 - q[e2]) ** b
        r[e] = 1.0 - prod
    q_next = np.empty(E)
    apost = np.empty(graph.n_vars)
    for v in range(graph.n_vars):
        eids = graph.ve_eid[graph.ve_ptr[v]:graph.ve_ptr[v + 1]]
        apost[v] = graph.eps[v] * np.prod([r[e2] ** graph.emult[e2] for e2 in eids])
    for e in range(E):
        v = graph.evar[e]
        prod = graph.eps[v]
        for e2 in graph.ve_eid[graph.ve_ptr[v]:graph.ve_ptr[v + 1]]:
            b = graph.emult[e2] - 1 if e2 == e else graph.emult[e2]
            prod *= r[e2] ** b
        q_next[e] = prod
    return r, q_next, apost


@dataclass(frozen=True)
class ConfigThreshold:
    """Per-configuration entry of a windowed threshold scan.

    ``exact`` marks a fully bisected value; otherwise ``threshold`` is only
    a certified lower bound (the configuration succeeded at the running
    minimum and cannot be the argmin).
    """

    config_index: int
    threshold: float
    exact: bool
    n_equivalent: int = 1


@dataclass(frozen=True)
class ThresholdResult:
    threshold: float
    bracket: float
    params: dict
    per_config: tuple[ConfigThreshold, ...] | None = None
    argmin_config: int | None = None


def _bisect(success_at: Callable[[float], bool], tol_eps: float,
            hi: float = 1.0, hi_fails: bool = False) -> tuple[float, float]:
    """Largest eps with success, bracketed to tol_eps.  Assumes success at 0."""
    if not hi_fails and success_at(hi):
        return hi, hi
    lo = 0.0
    while hi - lo > tol_eps:
        mid = 0.5 * (lo + hi)
        if success_at(mid):
            lo = mid
        else:
            hi = mid
    return lo, hi


def bp_threshold(ens_or_bm: Ensemble | BaseMatrix,
                 tol_eps: float = DEFAULT_TOL_EPS,
                 success_tol: float = DEFAULT_SUCCESS_TOL,
                 ftol: float = DEFAULT_FTOL,
                 max_iter: int = DEFAULT_MAX_ITER) -> ThresholdResult:
    """Bisect on the channel erasure rate for full-protograph BP success."""
    bm = ens_or_bm if isinstance(ens_or_bm, BaseMatrix) else base_matrix(ens_or_bm)
    graph = de_graph(bm, 0.0)
    tgt = np.arange(bm.cols, dtype=np.int64)

    def ok(eps_val: float) -> bool:
        eps = np.full(bm.cols, eps_val)
        status, _, _ = _solve(graph, eps, tgt, success_tol, ftol, max_iter)
        return status == _dekernels.SUCCESS

    lo, hi = _bisect(ok, tol_eps)
    return ThresholdResult(0.5 * (lo + hi), 0.5 * (hi - lo),
                           {"kind": "bp", "tol_eps": tol_eps})


def _window_success_fn(wp: WindowProtograph, delta: float,
                       ftol: float, max_iter: int) -> Callable[[float], bool]:
    graph = de_graph(wp.matrix, 0.0)
    left = wp.col_class == COL_LEFT
    if delta > 0.0:
        tgt = wp.targeted_cols.astype(np.int64)
        success_tol, eff_ftol = delta, ftol
    else:
        # delta = 0 uses the full-window criterion: every connected column
        # must reach numerical zero, not only the targeted prefix.
        # Multi-edge squares can drive the prefix to an exact zero while a
        # weak tail stalls, and the zero-target decoder does not accept
        # such windows.  Stall detection demands an exact float fixed
        # point, which monotone trajectories reach in finitely many steps.
        tgt = np.flatnonzero(wp.matrix.entries.any(axis=0)).astype(np.int64)
        success_tol, eff_ftol = ZERO_TOL, 0.0

    def ok(eps_val: float) -> bool:
        eps = np.where(left, delta, eps_val)
        status, _, _ = _solve(graph, eps, tgt, success_tol, eff_ftol, max_iter)
        return status == _dekernels.SUCCESS

    return ok


def window_config_threshold(ens: Ensemble, W: int, delta: float,
                            config_index: int, targeted_groups: int = 1,
                            tol_eps: float = DEFAULT_TOL_EPS,
                            ftol: float = DEFAULT_FTOL,
                            max_iter: int = DEFAULT_MAX_ITER) -> ThresholdResult:
    """Threshold of a single window configuration."""
    wp = window_subprotograph(ens, W, config_index, targeted_groups)
    ok = _window_success_fn(wp, delta, ftol, max_iter)
    lo, hi = _bisect(ok, tol_eps)
    return ThresholdResult(0.5 * (lo + hi), 0.5 * (hi - lo),
                           {"kind": "wd-config", "W": W, "delta": delta,
                            "targeted_groups": targeted_groups,
                            "config_index": config_index})


def windowed_threshold(ens: Ensemble, W: int, delta: float,
                       targeted_groups: int = 1,
                       tol_eps: float = DEFAULT_TOL_EPS,
                       ftol: float = DEFAULT_FTOL,
                       max_iter: int = DEFAULT_MAX_ITER) -> ThresholdResult:
    """Minimum of the window-configuration thresholds over all L positions.

    Structurally identical configurations (the generic mid-chain ones) are
    evaluated once.  A configuration that succeeds at the running minimum
    cannot attain the minimum and is recorded as a lower bound only.
    """
    window_bounds(ens, W)
    groups: dict[bytes, list] = {}
    order: list[bytes] = []
    for t in range(ens.L):
        wp = window_subprotograph(ens, W, t, targeted_groups)
        key = wp.structure_key()
        if key not in groups:
            groups[key] = [wp]
            order.append(key)
        else:
            groups[key].append(wp)
    # A generic configuration (most equivalents) is the usual minimizer;
    # evaluating it first lets everything else short-circuit.
    order.sort(key=lambda k: -len(groups[k]))

    best_lo, best_hi = None, None
    best_cfg = None
    per: list[ConfigThreshold] = []
    for key in order:
        wps = groups[key]
        wp = wps[0]
        ok = _window_success_fn(wp, delta, ftol, max_iter)
        if best_lo is not None and ok(best_lo):
            per.append(ConfigThreshold(wp.config_index, best_lo, False, len(wps)))
            continue
        if best_lo is None:
            lo, hi = _bisect(ok, tol_eps)
        else:
            # failed at the running minimum: its threshold lies below best_lo
            lo, hi = _bisect(ok, tol_eps, hi=best_lo, hi_fails=True)
        per.append(ConfigThreshold(wp.config_index, 0.5 * (lo + hi), True, len(wps)))
        if best_lo is None or hi < best_hi:
            best_lo, best_hi, best_cfg = lo, hi, wp.config_index
    per.sort(key=lambda ct: ct.config_index)
    return ThresholdResult(0.5 * (best_lo + best_hi), 0.5 * (best_hi - best_lo),
                           {"kind": "wd", "W": W, "delta": delta,
                            "targeted_groups": targeted_groups},
                           tuple(per), best_cfg)
