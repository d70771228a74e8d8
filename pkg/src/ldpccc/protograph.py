"""Terminated LDPC convolutional ensembles and their base matrices.

An ensemble is (J', K', m_s, L) plus one polynomial per variable column.
Column l = i*K'+j of the terminated base matrix carries x^(J'*i) * p_j(x);
truncating the bi-infinite band to the J'(L+m_s) x K'L rectangle realizes
the termination, with no extra bits.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .poly import Polynomial, degree_bounds, interleave, modulo_split, poly


@dataclass(frozen=True, eq=False)
class BaseMatrix:
    """Dense non-negative small-integer matrix of edge multiplicities."""

    entries: np.ndarray

    def __post_init__(self):
        e = np.asarray(self.entries, dtype=np.int64)
        if e.ndim != 2:
            raise ValueError("base matrix must be 2-D")
        if (e < 0).any():
            raise ValueError("negative multiplicity")
        object.__setattr__(self, "entries", e)

    @property
    def rows(self) -> int:
        return self.entries.shape[0]

    @property
    def cols(self) -> int:
        return self.entries.shape[1]


@dataclass(frozen=True)
class Ensemble:
    """Validated terminated LDPC-CC ensemble; construct via :func:`new_ensemble`."""

    Jprime: int
    Kprime: int
    ms: int
    L: int
    polys: tuple[Polynomial, ...]
    label: str = ""
    regular: bool = field(default=False, compare=False)

    @property
    def vn_degrees(self) -> tuple[int, ...]:
        return tuple(p.eval_at_one() for p in self.polys)

    @property
    def J(self) -> int | None:
        """CN-side degree parameter J = p_j(1); None when irregular."""
        return self.vn_degrees[0] if self.regular else None

    @property
    def K(self) -> int | None:
        if not self.regular:
            return None
        return self.vn_degrees[0] * self.Kprime // self.Jprime

    @property
    def n_check_groups(self) -> int:
        """Row groups of the terminated base matrix: L + m_s."""
        return self.L + self.ms

    @property
    def total_checks(self) -> int:
        """M_P = J'(L + m_s)."""
        return self.Jprime * (self.L + self.ms)

    @property
    def total_vars(self) -> int:
        return self.Kprime * self.L

    def with_L(self, L: int) -> "Ensemble":
        return new_ensemble(self.polys, self.Jprime, self.Kprime, self.ms, L,
                            label=self.label)


def regularity_check(polys: Sequence[Polynomial], Jprime: int) -> bool:
    """True iff all p_j(1) agree and the per-residue edge sums agree.

    These are the (J, K)-regularity constraints: p_j(1) = J for every column
    and sum_j p_j^[m](1) = K for every residue class m.
    """
    degs = [p.eval_at_one() for p in polys]
    if len(set(degs)) != 1:
        return False
    residue_sums = set()
    for m in range(Jprime):
        s = sum(sum(modulo_split(p, Jprime)[m].coeffs) for p in polys)
        residue_sums.add(s)
    return len(residue_sums) == 1


def new_ensemble(polys: Sequence[Polynomial | Sequence[int]], Jprime: int,
                 Kprime: int, ms: int, L: int, label: str = "") -> Ensemble:
    """Validate and build an ensemble.

    Rejects: empty/zero polynomials, degrees beyond (m_s+1)J'-1, and
    polynomial sets whose realized memory differs from the declared m_s
    (no column reaching the top J' band, or none starting in the bottom
    J' band).  Irregular sets are accepted; ``regular`` is a report flag.
    """
    if Jprime < 1 or Kprime < 2 or ms < 1 or L < 1:
        raise ValueError("require Jprime >= 1, Kprime >= 2, ms >= 1, L >= 1")
    ps = tuple(p if isinstance(p, Polynomial) else poly(p) for p in polys)
    if len(ps) != Kprime:
        raise ValueError(f"need {Kprime} polynomials, got {len(ps)}")
    dmax = (ms + 1) * Jprime - 1
    his, los = [], []
    for j, p in enumerate(ps):
        if p.is_zero:
            raise ValueError(f"column {j}: zero polynomial")
        lo, hi = degree_bounds(p)
        if hi > dmax:
            raise ValueError(f"column {j}: degree {hi} exceeds (ms+1)J'-1 = {dmax}")
        his.append(hi)
        los.append(lo)
    if max(his) < ms * Jprime:
        raise ValueError(f"realized memory {max(his) // Jprime} != declared ms {ms}")
    if min(los) >= Jprime:
        raise ValueError("no column starts in the bottom J' band")
    return Ensemble(Jprime, Kprime, ms, L, ps, label,
                    regular=regularity_check(ps, Jprime))


def base_matrix(ens: Ensemble) -> BaseMatrix:
    """Terminated base matrix B_[L], shape J'(L+m_s) x K'L."""
    rows = ens.total_checks
    b = np.zeros((rows, ens.total_vars), dtype=np.int64)
    for i in range(ens.L):
        for j, p in enumerate(ens.polys):
            col = i * ens.Kprime + j
            for r, c in enumerate(p.coeffs):
                if c:
                    b[ens.Jprime * i + r, col] = c
    return BaseMatrix(b)


def design_rate(ens: Ensemble) -> Fraction:
    """R_L = (K'L - J'(L+m_s)) / (K'L); may be negative for short L."""
    n = ens.Kprime * ens.L
    return Fraction(n - ens.Jprime * (ens.L + ens.ms), n)


@dataclass(frozen=True)
class DesignRuleReport:
    """Verdicts for the four ensemble design rules.

    rule1/rule3/rule4 are True/False or None when not applicable; rule2 is
    the vector of termination-strength sums (smaller is stronger), one per
    residue class, reported rather than judged.
    """

    rule1: bool | None
    rule1_witness: tuple[int, ...]
    rule2_sums: tuple[int, ...]
    rule3: bool
    rule3_witness: tuple[int | None, ...]
    rule4: bool | None


def check_design_rules(ens: Ensemble) -> DesignRuleReport:
    # Rule 1 (min-degree coefficient >= 2) is stated for K = K'J shapes,
    # i.e. J' == 1; Rule 4 additionally needs K' == 2.
    mindeg_coeffs = []
    for p in ens.polys:
        lo, _ = degree_bounds(p)
        mindeg_coeffs.append(p[lo])
    rule1 = None
    if ens.regular and ens.Jprime == 1:
        rule1 = all(c >= 2 for c in mindeg_coeffs)

    rule2 = tuple(sum(p[m] for p in ens.polys) for m in range(ens.Jprime))

    witness: list[int | None] = []
    for p in ens.polys:
        idx = next((i for i, c in enumerate(p.coeffs) if c == 1), None)
        witness.append(idx)
    rule3 = all(w is not None for w in witness)

    rule4 = None
    if ens.regular and ens.Jprime == 1 and ens.Kprime == 2:
        lo2, _ = degree_bounds(ens.polys[1])
        _, hi1 = degree_bounds(ens.polys[0])
        rule4 = (lo2 == 0) and (hi1 == ens.ms)

    return DesignRuleReport(rule1, tuple(mindeg_coeffs), rule2, rule3,
                            tuple(witness), rule4)


def classical_ensemble(J: int, Kprime: int, L: int) -> Ensemble:
    """All columns 1 + x + ... + x^(J-1); memory J-1, J' = 1."""
    if J < 2:
        raise ValueError("J must be >= 2")
    p = poly([1] * J)
    return new_ensemble([p] * Kprime, 1, Kprime, J - 1, L,
                        label=f"Cc({J},{Kprime * J})")


def max_span_family(J: int, Kprime: int, u: int, L: int) -> Ensemble:
    """Span-maximizing family: p_l = (J-1) + x^(m_s - u(l-1)), m_s = u(K'-1)+1.

    Its minimal stopping-set span is K'u + 2, the largest achievable at this
    memory; for K' = 2 and u = m_s - 1 it reduces to the optimal pair
    (J-1) + x^(m_s), (J-1) + x.
    """
    if J < 2:
        raise ValueError("J must be >= 2")
    if u < 1 or u > L - 1:
        raise ValueError("u must be in [1, L-1]")
    ms = u * (Kprime - 1) + 1
    ps = []
    for l in range(1, Kprime + 1):
        jl = ms - u * (l - 1)
        cs = [0] * (jl + 1)
        cs[0] = J - 1
        cs[jl] += 1
        ps.append(poly(cs))
    return new_ensemble(ps, 1, Kprime, ms, L,
                        label=f"maxspan(J={J},K'={Kprime},u={u})")


# Column roles inside a decoding window.
COL_LEFT, COL_TARGETED, COL_FUTURE = 0, 1, 2


@dataclass(frozen=True, eq=False)
class WindowProtograph:
    """Sub-protograph seen by one window configuration.

    ``matrix`` holds the window rows of B_[L] restricted to the column
    groups the window reaches; ``col_class`` labels each column left-decoded
    (targeted by an earlier configuration), targeted, or future.
    """

    matrix: BaseMatrix
    config_index: int
    W: int
    col_groups: np.ndarray      # per column: time instant in B_[L]
    col_class: np.ndarray       # per column: COL_LEFT / COL_TARGETED / COL_FUTURE
    n_left: int
    n_targeted: int

    @property
    def targeted_cols(self) -> np.ndarray:
        return np.flatnonzero(self.col_class == COL_TARGETED)

    def structure_key(self) -> bytes:
        """Configurations with equal keys have identical threshold behavior."""
        return (self.matrix.entries.shape[0].to_bytes(4, "little")
                + self.matrix.entries.tobytes()
                + self.col_class.astype(np.int8).tobytes())


def window_bounds(ens: Ensemble, W: int) -> None:
    # The decoding regime is m_s+1 <= W <= L-1; W in [L, L+m_s] is the
    # full-receipt window where every configuration sees all remaining rows.
    if W < ens.ms + 1 or W > ens.L + ens.ms:
        raise ValueError(f"W={W} outside [{ens.ms + 1}, {ens.L + ens.ms}]")


def window_subprotograph(ens: Ensemble, W: int, config_index: int,
                         targeted_groups: int = 1) -> WindowProtograph:
    """Window of size W at a configuration index.

    Rows J'*t .. J'*min(t+W, L+m_s)-1 of B_[L], truncated at the matrix edge
    for tail configurations; all column groups reaching into those rows.
    Columns in groups before t were targeted earlier (left-decoded); the
    next ``targeted_groups`` groups are targeted; the rest are future.
    """
    window_bounds(ens, W)
    t = config_index
    if not 0 <= t <= ens.L - 1:
        raise ValueError(f"config_index {t} outside [0, {ens.L - 1}]")
    if not 1 <= targeted_groups <= W:
        raise ValueError("targeted_groups must be in [1, W]")
    b = base_matrix(ens).entries
    r0 = ens.Jprime * t
    r1 = ens.Jprime * min(t + W, ens.L + ens.ms)
    g0 = max(0, t - ens.ms)
    g1 = min(t + W - 1, ens.L - 1)
    groups = np.repeat(np.arange(g0, g1 + 1), ens.Kprime)
    cols = np.concatenate([np.arange(g * ens.Kprime, (g + 1) * ens.Kprime)
                           for g in range(g0, g1 + 1)])
    cls = np.where(groups < t, COL_LEFT,
                   np.where(groups < t + targeted_groups, COL_TARGETED, COL_FUTURE))
    sub = BaseMatrix(b[r0:r1, cols])
    return WindowProtograph(sub, t, W, groups, cls.astype(np.int8),
                            int((cls == COL_LEFT).sum()),
                            int((cls == COL_TARGETED).sum()))


# --- serialization ----------------------------------------------------------

def ensemble_to_dict(ens: Ensemble) -> dict:
    return {"Jprime": ens.Jprime, "Kprime": ens.Kprime, "ms": ens.ms,
            "L": ens.L, "polys": [list(p.coeffs) for p in ens.polys],
            "label": ens.label}


def ensemble_from_dict(d: dict) -> Ensemble:
    return new_ensemble([poly(c) for c in d["polys"]], int(d["Jprime"]),
                        int(d["Kprime"]), int(d["ms"]), int(d["L"]),
                        label=str(d.get("label", "")))


def save_ensemble(ens: Ensemble, path: str) -> None:
    with open(path, "w") as f:
        json.dump(ensemble_to_dict(ens), f, indent=1)


def load_ensemble(path: str) -> Ensemble:
    with open(path) as f:
        return ensemble_from_dict(json.load(f))


# --- named presets ----------------------------------------------------------

def _c8(L: int) -> Ensemble:
    # J'=2 interleaving of the span-optimal (2,6) set with an all 1+x^3 set.
    set0 = [poly([1, 0, 0, 1]), poly([1, 0, 1]), poly([1, 1])]
    set1 = [poly([1, 0, 0, 1])] * 3
    ps = [interleave([a, b], 2) for a, b in zip(set0, set1)]
    return new_ensemble(ps, 2, 3, 3, L, label="c8")


_PRESETS = {
    "c1": lambda L: classical_ensemble(3, 2, L),
    "c2": lambda L: new_ensemble([poly([2, 0, 1]), poly([2, 1])], 1, 2, 2, L, label="c2"),
    "c3": lambda L: new_ensemble([poly([2, 1]), poly([2, 1])], 1, 2, 1, L, label="c3"),
    "c4": lambda L: new_ensemble([poly([3, 3])] * 2, 1, 2, 1, L, label="c4"),
    "c5": lambda L: new_ensemble([poly([2, 2])] * 2, 1, 2, 1, L, label="c5"),
    "c6": lambda L: new_ensemble([poly([2, 4])] * 2, 1, 2, 1, L, label="c6"),
    "c7": lambda L: new_ensemble([poly([2, 2, 2])] * 2, 1, 2, 2, L, label="c7"),
    "c8": _c8,
    # [2 2] on top of [1 1]: same polynomials as c3.
    "bprime": lambda L: new_ensemble([poly([2, 1]), poly([2, 1])], 1, 2, 1, L, label="bprime"),
}

PRESET_NAMES = tuple(_PRESETS)


def preset(name: str, L: int = 100) -> Ensemble:
    """Named ensemble presets (c1..c8, bprime) at termination length L."""
    try:
        factory = _PRESETS[name.lower()]
    except KeyError:
        raise KeyError(f"unknown preset {name!r}; have {', '.join(PRESET_NAMES)}")
    return factory(L)
