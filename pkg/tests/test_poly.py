import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ldpccc.poly import (Polynomial, boundary, degree_bounds, interleave,
                         modulo_split, monomial, poly, poly_prod, poly_sum,
                         precedes)


def naive_prod(a, b):
    """Dict-based convolution, independent of the list implementation."""
    out = {}
    for i, ca in enumerate(a.coeffs):
        for j, cb in enumerate(b.coeffs):
            out[i + j] = out.get(i + j, 0) + ca * cb
    n = max(out, default=-1) + 1
    return poly([out.get(i, 0) for i in range(n)])


polys = st.lists(st.integers(min_value=0, max_value=6), max_size=10).map(poly)
nonzero_polys = polys.filter(lambda p: not p.is_zero)


class TestConstruction:
    def test_canonical_strips_trailing_zeros(self):
        assert poly([1, 0, 2, 0, 0]).coeffs == (1, 0, 2)
        assert poly([0, 0]).coeffs == ()

    def test_zero_polynomial(self):
        z = Polynomial()
        assert z.is_zero and not z

    def test_rejects_negative(self):
        with pytest.raises(ValueError):
            poly([1, -1])

    def test_rejects_huge_coefficient(self):
        with pytest.raises(OverflowError):
            poly([2**31])

    def test_str(self):
        assert str(poly([2, 0, 1])) == "2 + x^2"
        assert str(poly([2, 1])) == "2 + x"


class TestDegreeBounds:
    def test_full_support(self):
        assert degree_bounds(poly([1, 1, 1])) == (0, 2)

    def test_monomial(self):
        assert degree_bounds(monomial(3)) == (3, 3)

    def test_two_terms(self):
        assert degree_bounds(poly([2, 1])) == (0, 1)

    def test_zero_rejected(self):
        with pytest.raises(ValueError):
            degree_bounds(Polynomial())


class TestBoundary:
    def test_skips_interior(self):
        assert boundary(poly([2, 0, 1])) == poly([1, 0, 1])
        assert boundary(poly([2, 1, 1])) == poly([1, 0, 1])

    def test_single_term(self):
        assert boundary(monomial(4, 3)) == monomial(4)

    def test_zero_rejected(self):
        with pytest.raises(ValueError):
            boundary(Polynomial())


class TestPrecedes:
    def test_same_ends_smaller_coeffs(self):
        assert precedes(poly([1, 0, 1]), poly([2, 0, 1]))

    def test_degree_mismatch(self):
        assert not precedes(poly([1, 1]), poly([1, 0, 1]))

    @given(nonzero_polys)
    def test_boundary_dominance(self, p):
        assert precedes(boundary(p), p)


class TestArithmetic:
    def test_binomial_square(self):
        assert poly_prod(poly([1, 1]), poly([1, 1])) == poly([1, 2, 1])

    def test_sum(self):
        assert poly_sum(poly([2, 0, 1]), poly([2, 1])) == poly([4, 1, 1])

    def test_memory_identity_coefficient(self):
        # (1 + x^m)(1 + x + ... + x^m) doubles exactly the x^m term
        for m in range(1, 6):
            a = poly([1] + [0] * (m - 1) + [1])
            b = poly([1] * (m + 1))
            prod = poly_prod(a, b)
            assert prod == naive_prod(a, b)
            assert prod[m] == 2
            assert all(prod[i] == 1 for i in range(2 * m + 1) if i != m)

    @given(polys, polys)
    def test_prod_matches_naive(self, a, b):
        assert poly_prod(a, b) == naive_prod(a, b)

    @given(nonzero_polys, nonzero_polys, nonzero_polys, nonzero_polys)
    @settings(max_examples=200)
    def test_order_preservation(self, a, b, c, d):
        # restrict to comparable pairs by clamping coefficients
        b = poly_sum(a, b) if degree_bounds(a) == degree_bounds(poly_sum(a, b)) else a
        d = poly_sum(c, d) if degree_bounds(c) == degree_bounds(poly_sum(c, d)) else c
        if precedes(a, b) and precedes(c, d):
            assert precedes(poly_sum(a, c), poly_sum(b, d))
            assert precedes(poly_prod(a, c), poly_prod(b, d))

    @given(polys)
    def test_eval_at_one_is_coefficient_sum(self, p):
        assert p.eval_at_one() == sum(p.coeffs)


class TestModuloSplit:
    def test_two_residues(self):
        assert modulo_split(poly([1, 0, 0, 1]), 2) == [poly([1]), poly([0, 1])]

    def test_single_residue(self):
        p = poly([3, 1, 2])
        assert modulo_split(p, 1) == [p]

    def test_interleaved_layers(self):
        # 1 + x + x^6 + x^7 splits into two copies of 1 + x^3
        p = poly([1, 1, 0, 0, 0, 0, 1, 1])
        assert modulo_split(p, 2) == [poly([1, 0, 0, 1])] * 2

    def test_interleave_examples(self):
        assert interleave([poly([1, 0, 0, 1])] * 2, 2) == poly([1, 1, 0, 0, 0, 0, 1, 1])
        assert interleave([poly([3, 1, 2])], 1) == poly([3, 1, 2])
        assert interleave([poly([1, 0, 1]), poly([1])], 2) == poly([1, 1, 0, 0, 1])

    def test_interleave_wrong_count(self):
        with pytest.raises(ValueError):
            interleave([poly([1])], 2)

    @given(polys, st.integers(min_value=1, max_value=5))
    def test_round_trip(self, p, jp):
        assert interleave(modulo_split(p, jp), jp) == p

    @given(st.lists(polys, min_size=1, max_size=4))
    def test_round_trip_reverse(self, parts):
        jp = len(parts)
        got = modulo_split(interleave(parts, jp), jp)
        assert got == parts
