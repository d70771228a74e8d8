"""Hot loop for erasure-probability density evolution.

Messages live on edge *classes*: a base-matrix entry b is one class of b
parallel copies whose messages coincide by symmetry, so a class contributes
an exponent b to the products of its neighbors and b-1 to its own extrinsic
product.  Exclusive products are formed with prefix/suffix passes, never by
division, so exact zeros (resolved symbols, delta = 0 pinning) are safe.

The check-node product of (1 - q) factors runs in log space: forming 1 - q
directly saturates on the float grid near 1, freezing decaying messages at
~2^-53 and breaking exact-zero detection.  log1p keeps tiny q exact, sums
of same-signed logs don't cancel, and -expm1 maps back without loss, so
convergent trajectories underflow to a true 0.0 in finitely many steps.
"""

from __future__ import annotations

import math

import numpy as np
from numba import njit

# status codes
SUCCESS, STALLED, MAXITER = 1, 0, 2

# below this magnitude a two-term Taylor series is exact to double precision
_TINY = 1e-8


@njit(cache=True, fastmath=False)
def _log1p_neg(q):
    """log(1 - q) for q in [0, 1]; exact for tiny q."""
    if q < _TINY:
        return -q * (1.0 + 0.5 * q)
    if q >= 1.0:
        return -np.inf
    return math.log1p(-q)


@njit(cache=True, fastmath=False)
def _one_minus_exp(s):
    """1 - exp(s) for s <= 0; exact for tiny |s|."""
    if s > -_TINY:
        return -s * (1.0 + 0.5 * s)
    return -math.expm1(s)


@njit(cache=True, fastmath=False)
def de_run(ce_ptr, ce_eid, ve_ptr, ve_eid, evar, emult, eps, tgt,
           success_tol, ftol, max_iter, q, r, apost):
    """Iterate CN/VN updates from the channel state until a verdict.

    success_tol >= 0 enables the success exit: every targeted variable's
    a-posteriori erasure <= success_tol.  Stall exit fires when the largest
    message change is <= ftol (ftol = 0 demands an exact fixed point, which
    monotone dynamics reach in finitely many float steps).  Returns
    (status, iterations); q, r, apost are left at the final state.
    """
    E = evar.shape[0]
    n_chk = ce_ptr.shape[0] - 1
    n_var = ve_ptr.shape[0] - 1
    w = np.empty(E, dtype=np.float64)
    pre = np.empty(E, dtype=np.float64)

    for e in range(E):
        q[e] = eps[evar[e]]
        r[e] = 0.0
    for v in range(n_var):
        apost[v] = eps[v]

    it = 0
    while it < max_iter:
        it += 1

        # CN side: r = 1 - prod_{other copies} (1 - q), in log space
        for e in range(E):
            w[e] = _log1p_neg(q[e])
        for c in range(n_chk):
            s = ce_ptr[c]
            t = ce_ptr[c + 1]
            acc = 0.0
            for i in range(s, t):
                pre[i] = acc
                acc += emult[ce_eid[i]] * w[ce_eid[i]]
            acc = 0.0
            for i in range(t - 1, s - 1, -1):
                e = ce_eid[i]
                excl = pre[i] + acc
                acc += emult[e] * w[e]
                if emult[e] > 1:
                    excl += (emult[e] - 1) * w[e]  # own parallel copies
                r[e] = _one_minus_exp(excl)

        # VN side: q = eps * prod_{other copies} r; apost = eps * prod_all r
        delta = 0.0
        for e in range(E):
            x = r[e]
            y = x
            for _ in range(emult[e] - 1):
                y *= x
            w[e] = y
        for v in range(n_var):
            s = ve_ptr[v]
            t = ve_ptr[v + 1]
            acc = 1.0
            for i in range(s, t):
                pre[i] = acc
                acc *= w[ve_eid[i]]
            apost[v] = eps[v] * acc
            acc = 1.0
            for i in range(t - 1, s - 1, -1):
                e = ve_eid[i]
                excl = pre[i] * acc
                acc *= w[e]
                x = r[e]
                own = 1.0
                for _ in range(emult[e] - 1):
                    own *= x
                qn = eps[v] * excl * own
                d = q[e] - qn
                if d < 0.0:
                    d = -d
                if d > delta:
                    delta = d
                q[e] = qn
        if success_tol >= 0.0:
            ok = True
            for k in range(tgt.shape[0]):
                if apost[tgt[k]] > success_tol:
                    ok = False
                    break
            if ok:
                return SUCCESS, it
        if delta <= ftol:
            return STALLED, it
    return MAXITER, it
