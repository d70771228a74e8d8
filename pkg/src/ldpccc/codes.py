"""Circulant expansion of protographs and finite-length erasure decoding.

A base-matrix entry b becomes the sum of b distinct-offset M x M circulant
permutation blocks.  Offsets are drawn from a seeded generator column by
column; the optional girth filter rejects offset choices that close a
4-cycle (two scalar rows sharing two scalar columns), which for circulants
reduces to coincidences among offset differences.

Decoding is peeling: over the erasure channel it reaches the same fixed
point as flooding BP, and its residual is exactly the maximal stopping set
inside the erased positions.  The windowed decoder runs peeling restricted
to W row groups at a time, sliding one group per configuration.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations

import numpy as np
import scipy.sparse as sp

from . import _peelkernels
from .gf2 import gf2_rank
from .protograph import Ensemble, base_matrix

ErasurePattern = np.ndarray  # length-n bool mask, True = erased


class ExpansionError(Exception):
    """Offset sampling could not satisfy the constraints."""


@dataclass(frozen=True, eq=False)
class ExpandedCode:
    ens: Ensemble
    M: int
    seed: int
    girth_filtered: bool
    H: sp.csr_matrix
    shifts: dict[tuple[int, int], tuple[int, ...]]
    _cache: dict = field(default_factory=dict, repr=False)

    @property
    def n(self) -> int:
        return self.H.shape[1]

    @property
    def n_rows(self) -> int:
        return self.H.shape[0]

    @property
    def k_design(self) -> int:
        return self.n - self.n_rows

    @property
    def rank(self) -> int:
        if "rank" not in self._cache:
            coo = self.H.tocoo()
            self._cache["rank"] = gf2_rank(coo.row, coo.col,
                                           self.n_rows, self.n)
        return self._cache["rank"]

    @property
    def k_true(self) -> int:
        return self.n - self.rank

    @property
    def rows_per_instant(self) -> int:
        return self.ens.Jprime * self.M

    @property
    def cols_per_instant(self) -> int:
        return self.ens.Kprime * self.M

    def _adjacency(self):
        """(check->var CSR, var->check CSC) index arrays for the peeler."""
        if "adj" not in self._cache:
            csr = self.H
            csc = self.H.tocsc()
            self._cache["adj"] = (csr.indptr.astype(np.int64),
                                  csr.indices.astype(np.int64),
                                  csc.indptr.astype(np.int64),
                                  csc.indices.astype(np.int64))
        return self._cache["adj"]


def _diff_set(a: tuple[int, ...], b: tuple[int, ...], M: int) -> set[int]:
    return {(x - y) % M for x in a for y in b}


def _has_repeated_diff(a: tuple[int, ...], b: tuple[int, ...], M: int) -> bool:
    seen = set()
    for x in a:
        for y in b:
            d = (x - y) % M
            if d in seen:
                return True
            seen.add(d)
    return False


def _internal_diffs(s: tuple[int, ...], M: int) -> list[int]:
    """Ordered pairwise differences within one block's offset set."""
    out = []
    for x, y in combinations(s, 2):
        out.append((x - y) % M)
        out.append((y - x) % M)
    return out


def _column_ok(cand: dict[int, tuple[int, ...]],
               placed: dict[tuple[int, int], tuple[int, ...]],
               M: int) -> bool:
    """4-cycle check for a freshly drawn column against itself and history."""
    rows_c = list(cand)
    # within one block: two distinct parallel-circulant pairs sharing a difference
    for r in rows_c:
        diffs = _internal_diffs(cand[r], M)
        if len(diffs) != len(set(diffs)):
            return False
    # two blocks in this column sharing an internal difference
    for r1, r2 in combinations(rows_c, 2):
        s1, s2 = cand[r1], cand[r2]
        if len(s1) >= 2 and len(s2) >= 2:
            if set(_internal_diffs(s1, M)) & set(_internal_diffs(s2, M)):
                return False
    # against every earlier column sharing at least one block row
    earlier = sorted({cc for (rr, cc) in placed})
    for c2 in earlier:
        shared = [r for r in rows_c if (r, c2) in placed]
        if not shared:
            continue
        for r in shared:
            if _has_repeated_diff(cand[r], placed[(r, c2)], M):
                return False
        for r1, r2 in combinations(shared, 2):
            d_a = _diff_set(cand[r1], placed[(r1, c2)], M)
            d_b = _diff_set(cand[r2], placed[(r2, c2)], M)
            if d_a & d_b:
                return False
    return True


def expand(ens: Ensemble, M: int, seed: int, girth_filter: bool | None = None,
           col_retries: int = 5000) -> ExpandedCode:
    """Deterministic seeded circulant expansion by factor M.

    M = 1 is the identity lifting, only meaningful for 0/1 base matrices.
    With the girth filter on (default for M >= 8) the resulting Tanner
    graph has no 4-cycles.
    """
    if M < 1:
        raise ValueError("M must be >= 1")
    B = base_matrix(ens).entries
    bmax = int(B.max())
    if M == 1 and bmax > 1:
        raise ExpansionError("M = 1 needs a 0/1 base matrix "
                             f"(largest multiplicity is {bmax})")
    if bmax > M:
        raise ExpansionError(f"multiplicity {bmax} exceeds lifting factor {M}")
    if girth_filter is None:
        girth_filter = M >= 8

    rng = np.random.default_rng(seed)
    shifts: dict[tuple[int, int], tuple[int, ...]] = {}
    n_rows, n_cols = B.shape
    for c in range(n_cols):
        rows_c = np.flatnonzero(B[:, c])
        ok = False
        for _ in range(col_retries):
            cand = {int(r): tuple(sorted(int(x) for x in
                                         rng.choice(M, size=int(B[r, c]),
                                                    replace=False)))
                    for r in rows_c}
            if not girth_filter or _column_ok(cand, shifts, M):
                ok = True
                break
        if not ok:
            raise ExpansionError(
                f"column {c}: no 4-cycle-free offsets after {col_retries} "
                f"draws (M={M}); increase M or disable the girth filter")
        for r, s in cand.items():
            shifts[(r, c)] = s

    rows_out = []
    cols_out = []
    i = np.arange(M)
    for (r, c), ss in shifts.items():
        for s in ss:
            rows_out.append(r * M + i)
            cols_out.append(c * M + (i + s) % M)
    rows_idx = np.concatenate(rows_out)
    cols_idx = np.concatenate(cols_out)
    H = sp.csr_matrix((np.ones(len(rows_idx), dtype=np.uint8),
                       (rows_idx, cols_idx)),
                      shape=(n_rows * M, n_cols * M))
    H.sum_duplicates()
    if int(H.data.max(initial=1)) > 1:
        raise ExpansionError("offset collision produced a multi-edge")
    return ExpandedCode(ens, M, seed, girth_filter, H, shifts)


@dataclass(frozen=True)
class WindowStats:
    config_index: int
    sweeps: int
    targeted_recovered: float
    met_delta: bool


@dataclass(frozen=True, eq=False)
class DecodeOutcome:
    known: np.ndarray            # per symbol: known after decoding
    residual: int
    success: bool
    sweeps: int
    windows: tuple[WindowStats, ...] | None = None
    w_ratio: float | None = None


def peel_decode(code: ExpandedCode, pattern: ErasurePattern,
                max_iter: int = 1 << 62) -> DecodeOutcome:
    """Full-matrix peeling; the residual is the maximal stopping set inside
    the erased positions."""
    erased = _as_erased(code, pattern)
    ck_ptr, ck_idx, vr_ptr, vr_idx = code._adjacency()
    sweeps, _ = _peelkernels.peel_run(ck_ptr, ck_idx, vr_ptr, vr_idx, erased,
                                      0, code.n_rows, 0, 0, -1.0, max_iter)
    residual = int(erased.sum())
    return DecodeOutcome(erased == 0, residual, residual == 0, int(sweeps))


def window_decode(code: ExpandedCode, pattern: ErasurePattern, W: int,
                  delta: float = 0.0, max_iter_per_window: int = 1 << 62,
                  carry: str = "all") -> DecodeOutcome:
    """Sliding-window peeling over L configurations.

    Each configuration activates W row groups (truncated at the bottom) and
    targets its leading column group.  A window stops once the targeted
    erasure fraction reaches delta or nothing more fires.  carry="all"
    keeps every recovered symbol; carry="targeted_only" forwards only
    recovered targeted symbols, discarding the rest of the window state.
    """
    ens = code.ens
    if W < ens.ms + 1 or W > ens.L + ens.ms:
        raise ValueError(f"W={W} outside [{ens.ms + 1}, {ens.L + ens.ms}]")
    if carry not in ("all", "targeted_only"):
        raise ValueError("carry must be 'all' or 'targeted_only'")
    erased = _as_erased(code, pattern)
    ck_ptr, ck_idx, vr_ptr, vr_idx = code._adjacency()
    rpi, cpi = code.rows_per_instant, code.cols_per_instant
    total_sweeps = 0
    stats = []
    for t in range(ens.L):
        row_lo = rpi * t
        row_hi = rpi * min(t + W, ens.L + ens.ms)
        tgt_lo, tgt_hi = cpi * t, cpi * (t + 1)
        work = erased if carry == "all" else erased.copy()
        sweeps, tgt_left = _peelkernels.peel_run(
            ck_ptr, ck_idx, vr_ptr, vr_idx, work, row_lo, row_hi,
            tgt_lo, tgt_hi, delta, max_iter_per_window)
        if carry == "targeted_only":
            erased[tgt_lo:tgt_hi] = work[tgt_lo:tgt_hi]
        total_sweeps += int(sweeps)
        frac_rec = 1.0 - tgt_left / cpi
        stats.append(WindowStats(t, int(sweeps), frac_rec,
                                 tgt_left <= delta * cpi))
    residual = int(erased.sum())
    return DecodeOutcome(erased == 0, residual, residual == 0, total_sweeps,
                         tuple(stats), (W + ens.ms) / ens.L)


def _as_erased(code: ExpandedCode, pattern: ErasurePattern) -> np.ndarray:
    p = np.asarray(pattern)
    if p.shape != (code.n,):
        raise ValueError(f"pattern length {p.shape} != code length {code.n}")
    return p.astype(np.uint8).copy()


def mbl_bounds(min_span: int, M: int) -> tuple[int, int]:
    """Burst-length band implied by the minimal protograph span:
    M(span-2)+1 <= max burst <= M*span - 1."""
    if min_span < 2:
        raise ValueError("bounds need min_span >= 2")
    return M * (min_span - 2) + 1, M * min_span - 1


def mbl_search(code: ExpandedCode, decoder: str = "bp", W: int | None = None,
               delta: float = 0.0) -> int:
    """Largest L such that every solid erasure burst of length L decodes.

    Per start position, binary search on the burst length (erasure supersets
    can only decode worse, so decodability is monotone in the length), then
    the minimum over positions.  Positions whose remaining suffix decodes
    entirely impose no constraint.
    """
    if decoder not in ("bp", "wd"):
        raise ValueError("decoder must be 'bp' or 'wd'")
    if decoder == "wd" and W is None:
        raise ValueError("wd decoder needs W")
    n = code.n

    def ok(s: int, length: int) -> bool:
        if length == 0:
            return True
        pattern = np.zeros(n, dtype=bool)
        pattern[s:s + length] = True
        if decoder == "bp":
            return peel_decode(code, pattern).success
        return window_decode(code, pattern, W, delta=delta).success

    best = n
    for s in range(n):
        reach = min(best, n - s)
        if ok(s, reach):
            continue  # cannot constrain the current minimum
        lo, hi = 0, reach
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if ok(s, mid):
                lo = mid
            else:
                hi = mid
        best = lo
    return best


def export_coordinates(code: ExpandedCode, path: str) -> None:
    """Sparse coordinate dump: header 'n_rows n_cols nnz', then 'row col' lines."""
    coo = code.H.tocoo()
    order = np.lexsort((coo.col, coo.row))
    with open(path, "w") as f:
        f.write(f"{code.n_rows} {code.n} {coo.nnz}\n")
        for r, c in zip(coo.row[order], coo.col[order]):
            f.write(f"{r} {c}\n")
