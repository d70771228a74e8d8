"""Exact integer polynomial algebra for protograph column descriptions.

A column of a convolutional protograph is a polynomial with non-negative
integer coefficients: the coefficient of x^i is the edge multiplicity the
column places in the i-th row of its band.  Everything here is exact integer
arithmetic; there is deliberately no field/rational support.

Conventions:

- coefficients are stored lowest degree first,
- canonical form strips trailing zeros, so the zero polynomial is ``()``,
- JSON form is a plain integer list, e.g. ``[2, 0, 1]`` is ``2 + x^2``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

# Multiplicities in protographs are tiny; a huge coefficient means the caller
# multiplied something that is not a protograph description.
COEFF_LIMIT = 2**31 - 1


@dataclass(frozen=True)
class Polynomial:
    """Immutable non-negative integer polynomial, lowest degree first."""

    coeffs: tuple[int, ...]

    def __init__(self, coeffs: Iterable[int] = ()):
        cs = list(coeffs)
        for c in cs:
            if not isinstance(c, (int,)) or isinstance(c, bool):
                raise TypeError(f"coefficient {c!r} is not an int")
            if c < 0:
                raise ValueError(f"negative coefficient {c}")
            if c > COEFF_LIMIT:
                raise OverflowError(f"coefficient {c} exceeds {COEFF_LIMIT}")
        while cs and cs[-1] == 0:
            cs.pop()
        object.__setattr__(self, "coeffs", tuple(cs))

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    def __bool__(self) -> bool:
        return not self.is_zero

    def __getitem__(self, i: int) -> int:
        """Coefficient of x^i (0 beyond the stored range)."""
        return self.coeffs[i] if 0 <= i < len(self.coeffs) else 0

    def __add__(self, other: "Polynomial") -> "Polynomial":
        return poly_sum(self, other)

    def __mul__(self, other: "Polynomial") -> "Polynomial":
        return poly_prod(self, other)

    def shift(self, k: int) -> "Polynomial":
        """Multiply by x^k."""
        if k < 0:
            raise ValueError("negative shift")
        if self.is_zero:
            return self
        return Polynomial((0,) * k + self.coeffs)

    def eval_at_one(self) -> int:
        """p(1): total edge endpoints contributed by the column."""
        return sum(self.coeffs)

    def __str__(self) -> str:
        if self.is_zero:
            return "0"
        terms = []
        for i, c in enumerate(self.coeffs):
            if c == 0:
                continue
            if i == 0:
                terms.append(str(c))
            else:
                x = "x" if i == 1 else f"x^{i}"
                terms.append(x if c == 1 else f"{c}{x}")
        return " + ".join(terms)


def poly(coeffs: Sequence[int]) -> Polynomial:
    """Shorthand constructor, lowest degree first."""
    return Polynomial(coeffs)


def monomial(k: int, c: int = 1) -> Polynomial:
    """c * x^k."""
    return Polynomial((0,) * k + (c,))


def degree_bounds(p: Polynomial) -> tuple[int, int]:
    """(min_deg, deg): smallest and largest exponent with positive coefficient.

    Raises ValueError on the zero polynomial, which has neither.
    """
    if p.is_zero:
        raise ValueError("zero polynomial has no degree bounds")
    lo = next(i for i, c in enumerate(p.coeffs) if c > 0)
    return lo, len(p.coeffs) - 1


def boundary(p: Polynomial) -> Polynomial:
    """x^i + x^j with i = min_deg(p), j = deg(p); x^i when i == j."""
    lo, hi = degree_bounds(p)
    cs = [0] * (hi + 1)
    cs[lo] = 1
    cs[hi] = 1
    return Polynomial(cs)


def precedes(a: Polynomial, b: Polynomial) -> bool:
    """Partial order: same min_deg, same deg, coefficient-wise a <= b."""
    alo, ahi = degree_bounds(a)
    blo, bhi = degree_bounds(b)
    if (alo, ahi) != (blo, bhi):
        return False
    return all(a[i] <= b[i] for i in range(ahi + 1))


def poly_sum(a: Polynomial, b: Polynomial) -> Polynomial:
    n = max(len(a.coeffs), len(b.coeffs))
    return Polynomial([a[i] + b[i] for i in range(n)])


def poly_prod(a: Polynomial, b: Polynomial) -> Polynomial:
    if a.is_zero or b.is_zero:
        return Polynomial()
    out = [0] * (len(a.coeffs) + len(b.coeffs) - 1)
    for i, ca in enumerate(a.coeffs):
        if ca == 0:
            continue
        for j, cb in enumerate(b.coeffs):
            out[i + j] += ca * cb
    if any(c > COEFF_LIMIT for c in out):
        raise OverflowError("product coefficient exceeds COEFF_LIMIT")
    return Polynomial(out)


def modulo_split(p: Polynomial, Jprime: int) -> list[Polynomial]:
    """Split into J' residue-class polynomials.

    Part m collects the coefficients at exponents congruent to m mod J',
    re-indexed: part_m = sum_h p^(h*J'+m) x^h.  Exact inverse of
    :func:`interleave`.
    """
    if Jprime < 1:
        raise ValueError("Jprime must be >= 1")
    parts: list[list[int]] = [[] for _ in range(Jprime)]
    for e, c in enumerate(p.coeffs):
        h, m = divmod(e, Jprime)
        part = parts[m]
        while len(part) <= h:
            part.append(0)
        part[h] = c
    return [Polynomial(cs) for cs in parts]


def interleave(parts: Sequence[Polynomial], Jprime: int) -> Polynomial:
    """Inverse of :func:`modulo_split`: coefficient h of parts[m] goes to x^(h*J'+m)."""
    if len(parts) != Jprime:
        raise ValueError(f"expected {Jprime} parts, got {len(parts)}")
    n = max((len(q.coeffs) for q in parts), default=0)
    out = [0] * (n * Jprime)
    for m, q in enumerate(parts):
        for h, c in enumerate(q.coeffs):
            out[h * Jprime + m] = c
    return Polynomial(out)
