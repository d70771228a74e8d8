"""Bit-packed GF(2) rank for sparse binary parity-check matrices."""

from __future__ import annotations

import numpy as np


def gf2_rank(rows_idx: np.ndarray, cols_idx: np.ndarray,
             n_rows: int, n_cols: int) -> int:
    """Rank over GF(2) from coordinate lists of the 1-entries.

    Rows are packed 64 columns per word; elimination xors whole packed rows,
    so the inner loop is vectorized over words.
    """
    nwords = (n_cols + 63) // 64
    bits = np.zeros((n_rows, nwords), dtype=np.uint64)
    w = (cols_idx // 64).astype(np.int64)
    b = (cols_idx % 64).astype(np.uint64)
    np.bitwise_xor.at(bits, (rows_idx, w), np.uint64(1) << b)

    rank = 0
    for col in range(n_cols):
        if rank == n_rows:
            break
        wi, bi = col // 64, np.uint64(col % 64)
        colbits = (bits[rank:, wi] >> bi) & np.uint64(1)
        nz = np.flatnonzero(colbits)
        if nz.size == 0:
            continue
        piv = rank + nz[0]
        if piv != rank:
            bits[[rank, piv]] = bits[[piv, rank]]
        others = rank + nz[1:]
        if others.size:
            bits[others] ^= bits[rank]
        rank += 1
    return rank
