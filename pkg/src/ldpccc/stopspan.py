"""Protograph stopping sets: exact minimal size/span search and bounds.

A set of base-matrix columns is a stopping set when every check row touched
by the set is touched with total multiplicity at least 2 (a single entry 2
counts as twice).  Peeling halts exactly on such sets, so the least number
of consecutive columns containing one (the minimal span) governs how long a
solid erasure burst the expanded code survives.

Column subsets are tracked through their summed column polynomials: a subset
is a stopping set iff the sum has no coefficient equal to 1.  The witness
construction and pairwise bound below follow the boundary-polynomial slope
argument: multiplying the two column polynomials by the unit-coefficient
ladders that interlock their supports forces every sum coefficient to 2.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .poly import Polynomial, degree_bounds, modulo_split, poly_prod, poly_sum
from .protograph import (BaseMatrix, Ensemble, base_matrix, new_ensemble,
                         window_subprotograph)

DEFAULT_SUBSET_CAP = 2**24


class SearchCapExceeded(Exception):
    """Exact search abandoned: width or subset budget exhausted."""


@dataclass(frozen=True)
class StoppingSet:
    columns: tuple[int, ...]

    @property
    def size(self) -> int:
        return len(self.columns)

    @property
    def span(self) -> int:
        return max(self.columns) - min(self.columns) + 1


@dataclass(frozen=True)
class SpanReport:
    min_span: int | None
    min_size: int | None
    span_witness: StoppingSet | None
    size_witness: StoppingSet | None
    width_cap: int
    cap_exceeded: bool
    bound: int | None = None
    bound_source: str | None = None


def is_stopping_set(bm: BaseMatrix, cols: Sequence[int]) -> bool:
    """Multiplicity-counting membership test.

    Columns with no entries at all are vacuously admissible here; the span
    searches below never propose them.
    """
    cols = list(cols)
    if not cols:
        raise ValueError("empty column set")
    if min(cols) < 0 or max(cols) >= bm.cols:
        raise ValueError("column index out of range")
    s = bm.entries[:, cols].sum(axis=1)
    return not bool((s == 1).any())


def _window_masks(width: int, mid_alive: np.ndarray) -> np.ndarray:
    """0/1 selection matrix (width x n_masks): both extremes fixed to 1,
    all subsets of the alive middle columns."""
    mids = np.flatnonzero(mid_alive)
    n = 1 << len(mids)
    masks = np.zeros((width, n), dtype=np.int64)
    masks[0, :] = 1
    masks[width - 1, :] = 1
    for bit, m in enumerate(mids):
        masks[1 + m, (np.arange(n) >> bit) & 1 == 1] = 1
    return masks


def _scan_width(entries: np.ndarray, w: int, col_alive: np.ndarray,
                start_limit: int | None, cache: dict, budget: list[int]):
    """All windows of w consecutive columns; returns the best (fewest-column)
    stopping set touching both extremes, or None."""
    n_rows, n_cols = entries.shape
    best = None
    starts = range(n_cols - w + 1) if start_limit is None else \
        range(min(start_limit, n_cols - w + 1))
    for s in starts:
        if not (col_alive[s] and col_alive[s + w - 1]):
            continue
        block = entries[:, s:s + w]
        rows = np.flatnonzero(block.any(axis=1))
        crop = block[rows]
        key = (w, crop.tobytes(), col_alive[s + 1:s + w - 1].tobytes())
        if key in cache:
            hit = cache[key]
        else:
            masks = _window_masks(w, col_alive[s + 1:s + w - 1]) if w >= 2 \
                else np.ones((1, 1), dtype=np.int64)
            budget[0] -= masks.shape[1]
            if budget[0] < 0:
                raise SearchCapExceeded(f"subset budget exhausted at width {w}")
            sums = crop @ masks
            valid = ~np.any(sums == 1, axis=0)
            if valid.any():
                sizes = masks.sum(axis=0)
                sizes = np.where(valid, sizes, np.iinfo(np.int64).max)
                m = int(np.argmin(sizes))
                hit = tuple(int(i) for i in np.flatnonzero(masks[:, m]))
            else:
                hit = None
            cache[key] = hit
        if hit is not None:
            cand = StoppingSet(tuple(s + i for i in hit))
            if best is None or cand.size < best.size:
                best = cand
    return best


def _connected_subsets(adj: list[list[int]], k: int, n_cols: int,
                       col_alive: np.ndarray, budget: list[int]):
    """Connected column subsets of size exactly k (ESU enumeration)."""
    for v in range(n_cols):
        if not col_alive[v]:
            continue
        ext0 = [u for u in adj[v] if u > v]
        stack = [([v], ext0)]
        while stack:
            sub, ext = stack.pop()
            if len(sub) == k:
                budget[0] -= 1
                if budget[0] < 0:
                    raise SearchCapExceeded("subset budget exhausted in size search")
                yield sub
                continue
            for i, u in enumerate(ext):
                new_ext = ext[i + 1:] + [x for x in adj[u]
                                         if x > v and x not in ext and x not in sub]
                stack.append((sub + [u], new_ext))


def min_span(bm: BaseMatrix, width_cap: int = 16,
             subset_cap: int = DEFAULT_SUBSET_CAP) -> SpanReport:
    """Exact minimal span and minimal size by brute enumeration.

    Span: widths are scanned in increasing order; every candidate subset
    contains both extreme columns of its window, so the first width with a
    stopping set is exact.  Size: a minimum-size stopping set splits into
    no row-disjoint parts (a part would be smaller), hence is connected in
    the column-overlap graph, so enumerating connected subsets in size order
    is exhaustive.
    """
    entries = bm.entries
    col_alive = entries.any(axis=0)
    cache: dict = {}
    budget = [subset_cap]
    cap = min(width_cap, bm.cols)

    span_witness = None
    try:
        for w in range(1, cap + 1):
            span_witness = _scan_width(entries, w, col_alive, None, cache, budget)
            if span_witness is not None:
                break
    except SearchCapExceeded:
        return SpanReport(None, None, None, None, cap, True)
    if span_witness is None:
        return SpanReport(None, None, None, None, cap, True)

    # Minimal size: check all connected subsets smaller than the best
    # witness seen so far.
    size_witness = span_witness
    overlap = (entries > 0).T.astype(np.int64) @ (entries > 0).astype(np.int64)
    np.fill_diagonal(overlap, 0)
    adj = [list(np.flatnonzero(overlap[v] > 0)) for v in range(bm.cols)]
    try:
        for k in range(1, size_witness.size):
            found = None
            for sub in _connected_subsets(adj, k, bm.cols, col_alive, budget):
                if is_stopping_set(bm, sub):
                    found = StoppingSet(tuple(sorted(sub)))
                    break
            if found is not None:
                size_witness = found
                break
    except SearchCapExceeded:
        return SpanReport(span_witness.span, None, span_witness, None, cap, True)

    return SpanReport(span_witness.span, size_witness.size, span_witness,
                      size_witness, cap, False)


def windowed_min_span(ens: Ensemble, W: int, targeted_groups: int = 1,
                      width_cap: int | None = None,
                      subset_cap: int = DEFAULT_SUBSET_CAP) -> int:
    """Minimal span over window stopping sets touching a targeted column.

    Works on the window's own W column groups (the fresh, not yet decoded
    part, identical at every non-terminated position); a qualifying set must
    include one of the first targeted_groups*K' columns, so only windows
    starting inside the targeted prefix are scanned.
    """
    wp = window_subprotograph(ens, W, 0, targeted_groups)
    entries = wp.matrix.entries
    col_alive = entries.any(axis=0)
    cap = min(entries.shape[1],
              width_cap if width_cap is not None else 2 * ens.ms + 4)
    cache: dict = {}
    budget = [subset_cap]
    for w in range(1, cap + 1):
        hit = _scan_width(entries, w, col_alive, wp.n_targeted, cache, budget)
        if hit is not None:
            return w
    raise SearchCapExceeded(f"no window stopping set within width {cap}")


def span_bound_pair(p_a: Polynomial, p_b: Polynomial, Kprime: int,
                    offset: int = 1) -> int:
    """Pairwise span upper bound from the two-column witness construction.

    ``offset`` is the column distance l2 - l1 between the two polynomials
    inside one time instant (1 for adjacent columns, which is the only case
    when K' = 2).  Both polynomials must have min_deg < deg.
    """
    i1, j1 = degree_bounds(p_a)
    i2, j2 = degree_bounds(p_b)
    if i1 == j1 or i2 == j2:
        raise ValueError("monomial column: pairwise bound needs min_deg < deg")
    if offset < 1:
        raise ValueError("offset must be >= 1")
    m = max(j1, j2) - min(i1, i2)
    if i2 <= i1 and j2 <= j1:
        return Kprime * (m - 1) + (offset + 1)
    if i2 <= i1 or j2 <= j1:
        return Kprime * (m - 1) + 1
    return Kprime * (m - 1) - (offset - 1)


def span_bound(ens: Ensemble) -> tuple[int, str]:
    """Best available analytic upper bound on the minimal span.

    Minimum of the pairwise bounds over all column pairs with non-monomial
    polynomials, capped by the termination bound K'L.
    """
    best = ens.Kprime * ens.L
    source = "termination cap K'L"
    for l1 in range(ens.Kprime):
        for l2 in range(l1 + 1, ens.Kprime):
            try:
                b = span_bound_pair(ens.polys[l1], ens.polys[l2], ens.Kprime,
                                    offset=l2 - l1)
            except ValueError:
                continue
            if b < best:
                best = b
                source = f"pair ({l1 + 1},{l2 + 1})"
    return best, source


def _ladder(lo: int, hi: int) -> Polynomial:
    """x^lo + x^(lo+1) + ... + x^(hi-1); requires lo < hi."""
    return Polynomial([0] * lo + [1] * (hi - lo))


def witness_pair(p_a: Polynomial, p_b: Polynomial) -> StoppingSet:
    """Constructive stopping set for a two-column-per-instant protograph.

    Selects the columns x^h p_a for h in [min_deg(p_b), deg(p_b)) and
    x^h p_b for h in [min_deg(p_a), deg(p_a)); the summed polynomial has
    every coefficient >= 2.  Verified against the realized band matrix;
    its span equals span_bound_pair by construction.
    """
    i1, j1 = degree_bounds(p_a)
    i2, j2 = degree_bounds(p_b)
    if i1 == j1 or i2 == j2:
        raise ValueError("monomial column: witness needs min_deg < deg")
    b1 = _ladder(i2, j2)
    b2 = _ladder(i1, j1)
    cols = sorted([2 * h for h in range(i2, j2)] + [2 * h + 1 for h in range(i1, j1)])
    r = poly_sum(poly_prod(p_a, b1), poly_prod(p_b, b2))
    if any(c == 1 for c in r.coeffs):
        raise RuntimeError("witness construction produced a unit coefficient")

    n_groups = max(j2, j1)  # shifts reach h <= max(j1, j2) - 1
    n_rows = n_groups - 1 + max(j1, j2) + 1
    band = np.zeros((n_rows, 2 * n_groups), dtype=np.int64)
    for g in range(n_groups):
        for j, p in enumerate((p_a, p_b)):
            for e, c in enumerate(p.coeffs):
                if c:
                    band[g + e, 2 * g + j] = c
    ss = StoppingSet(tuple(cols))
    if not is_stopping_set(BaseMatrix(band), ss.columns):
        raise RuntimeError("witness failed matrix-level verification")
    expected = span_bound_pair(p_a, p_b, 2, 1)
    if ss.span != expected:
        raise RuntimeError(f"witness span {ss.span} != pairwise bound {expected}")
    return ss


@dataclass(frozen=True)
class GcdMonotonicityReport:
    applicable: bool
    reason: str = ""
    span_full: int | None = None
    spans_sub: tuple[int, ...] = ()

    @property
    def holds(self) -> bool | None:
        if not self.applicable or self.span_full is None:
            return None
        return self.span_full >= max(self.spans_sub)


def check_gcd_monotonicity(ens: Ensemble, width_cap: int | None = None) -> GcdMonotonicityReport:
    """Interleaved ensembles span at least as far as their residue layers.

    Applicable when J' > 1 and every residue-class polynomial set is itself
    a valid ensemble of the same memory; verified by exact search on both.
    """
    if ens.Jprime == 1:
        return GcdMonotonicityReport(False, "J' = 1: nothing to split")
    layers = []
    for l in range(ens.Jprime):
        layer = [modulo_split(p, ens.Jprime)[l] for p in ens.polys]
        if any(q.is_zero for q in layer):
            return GcdMonotonicityReport(False, f"residue class {l} has a zero column")
        try:
            layers.append(new_ensemble(layer, 1, ens.Kprime, ens.ms, ens.L))
        except ValueError as exc:
            return GcdMonotonicityReport(False, f"residue class {l}: {exc}")
    cap = width_cap if width_cap is not None else 2 * ens.ms + 4
    full = min_span(base_matrix(ens), width_cap=cap)
    subs = [min_span(base_matrix(sub), width_cap=cap) for sub in layers]
    if full.cap_exceeded or any(s.cap_exceeded for s in subs):
        return GcdMonotonicityReport(False, "exact search exceeded width cap")
    return GcdMonotonicityReport(True, "", full.min_span,
                                 tuple(s.min_span for s in subs))


def span_report(ens: Ensemble, width_cap: int | None = None,
                subset_cap: int = DEFAULT_SUBSET_CAP) -> SpanReport:
    """Exact search on B_[L] annotated with the analytic bound."""
    cap = width_cap if width_cap is not None else 2 * ens.ms + 4
    rep = min_span(base_matrix(ens), width_cap=cap, subset_cap=subset_cap)
    bound, source = span_bound(ens)
    return SpanReport(rep.min_span, rep.min_size, rep.span_witness,
                      rep.size_witness, rep.width_cap, rep.cap_exceeded,
                      bound, source)
