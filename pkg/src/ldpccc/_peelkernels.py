"""Peeling decoder inner loop over a CSR/CSC adjacency pair.

Erasure decoding by iterated single-unknown check resolution, organized in
sweeps (layers): checks that reach exactly one erased neighbor during sweep
k fire in sweep k+1.  Restricting the active check-row range gives the
windowed decoder for free.
"""

from __future__ import annotations

import numpy as np
from numba import njit


@njit(cache=True)
def peel_run(ck_ptr, ck_idx, vr_ptr, vr_idx, erased,
             row_lo, row_hi, tgt_lo, tgt_hi, delta_frac, max_sweeps):
    """Peel within check rows [row_lo, row_hi); mutates ``erased``.

    Stops when no check can fire, after max_sweeps, or as soon as the
    erased fraction of the targeted columns [tgt_lo, tgt_hi) drops to
    delta_frac (negative delta_frac disables the early stop).
    Returns (sweeps_used, targets_still_erased).
    """
    n_active = row_hi - row_lo
    cnt = np.zeros(n_active, dtype=np.int64)
    fire = np.empty(n_active, dtype=np.int64)
    nxt = np.empty(n_active, dtype=np.int64)
    nfire = 0
    for r in range(row_lo, row_hi):
        c = 0
        for k in range(ck_ptr[r], ck_ptr[r + 1]):
            if erased[ck_idx[k]]:
                c += 1
        cnt[r - row_lo] = c
        if c == 1:
            fire[nfire] = r
            nfire += 1

    tgt_total = tgt_hi - tgt_lo
    tgt_left = 0
    for v in range(tgt_lo, tgt_hi):
        if erased[v]:
            tgt_left += 1

    sweeps = 0
    while nfire > 0 and sweeps < max_sweeps:
        if delta_frac >= 0.0 and tgt_left <= delta_frac * tgt_total:
            break
        sweeps += 1
        nnext = 0
        for i in range(nfire):
            r = fire[i]
            if cnt[r - row_lo] != 1:
                continue
            v = -1
            for k in range(ck_ptr[r], ck_ptr[r + 1]):
                if erased[ck_idx[k]]:
                    v = ck_idx[k]
                    break
            if v < 0:
                continue
            erased[v] = 0
            if tgt_lo <= v < tgt_hi:
                tgt_left -= 1
            for k in range(vr_ptr[v], vr_ptr[v + 1]):
                rr = vr_idx[k]
                if rr < row_lo or rr >= row_hi:
                    continue
                cnt[rr - row_lo] -= 1
                if cnt[rr - row_lo] == 1:
                    nxt[nnext] = rr
                    nnext += 1
        for i in range(nnext):
            fire[i] = nxt[i]
        nfire = nnext
    return sweeps, tgt_left
