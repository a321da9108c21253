import itertools
from fractions import Fraction
from math import comb, factorial

import pytest
import sympy
from hypothesis import given, strategies as st

from crank.invariants import (CONDITIONAL, EXACT, LOWER, UPPER, BoundQuery, ChernVector, NonIntegralChern,
                              OddRankError, bound_value, bounds_table, chern_boundary_l3, chern_bounds_check,
                              chern_product, codim_table, cokernel_chern, independent_relation_count,
                              quadric_betti, quadric_betti_numbers, quadric_euler, selfdual_relation,
                              selfdual_relations, skew_codim, westwick_closed_form, westwick_matrix)


def macmahon_box(a, b, c):
    """Plane partitions in an a x b x c box."""
    out = Fraction(1)
    for i in range(1, a + 1):
        for j in range(1, b + 1):
            out *= Fraction(i + j + c - 1, i + j - 1)
    return out


def split_quadric_points(r, q):
    """Oracle: F_q-points of the split smooth quadric in P^(r-1), by brute force."""
    def form(x):
        v = sum(x[2 * i] * x[2 * i + 1] for i in range(r // 2))
        return (v + (x[-1] ** 2 if r % 2 else 0)) % q
    count = 0
    for x in itertools.product(range(q), repeat=r):
        first = next((c for c in x if c), None)
        if first == 1 and form(x) == 0:
            count += 1
    return count


# -- Chern vectors -------------------------------------------------------------------

def test_chern_product_examples():
    assert chern_product(ChernVector.of(1, 1, 0), ChernVector.of(1, -1, 1)) == ChernVector.one(2)
    x = ChernVector.of(1, 3, -2)
    assert chern_product(x, ChernVector.one(2)) == x
    with pytest.raises(ValueError):
        chern_product(ChernVector.one(2), ChernVector.one(3))


@given(st.lists(st.integers(-5, 5), min_size=1, max_size=4))
def test_inverse_matches_sympy_series(coeffs):
    c = ChernVector.of(1, *coeffs)
    h = sympy.symbols("h")
    series = sympy.series(1 / sum(Fraction(a) * h ** i for i, a in enumerate(c.coeffs)), h, 0, c.degree + 1)
    poly = sympy.Poly(series.removeO(), h)
    expected = [poly.coeff_monomial(h ** i) for i in range(c.degree + 1)]
    assert [sympy.Rational(x.numerator, x.denominator) for x in c.inverse().coeffs] == expected


def test_chern_string_forms():
    assert str(ChernVector.of(1, 4, 10, 16)) == "1 + 4h + 10h^2 + 16h^3"
    assert str(ChernVector.of(1, -4, 6)) == "1 - 4h + 6h^2"
    assert str(ChernVector.of(1, 0, Fraction(5, 3))) == "1 + (5/3)h^2"


def test_boundary_example_r8():
    cK, cE = chern_boundary_l3(8)
    assert cE == ChernVector.of(1, 4, 10, 16)
    assert cK == ChernVector.of(1, -4, 6)
    assert str(cE) == "1 + 4h + 10h^2 + 16h^3"
    assert chern_product(cK.pad(3), cE) == ChernVector.one(3)


@pytest.mark.parametrize("r", [4, 6])
def test_boundary_rejects_non_integral(r):
    with pytest.raises(NonIntegralChern) as info:
        chern_boundary_l3(r)
    assert info.value.term == "c2(K)"
    assert info.value.value == Fraction(r * (r + 1), 12)


def test_boundary_general_closed_forms():
    for r in range(8, 40, 2):
        try:
            cK, cE = chern_boundary_l3(r)
        except NonIntegralChern:
            assert any(Fraction(v).denominator != 1 for v in
                       (Fraction(r * (r + 1), 12), Fraction(r * (2 * r - 1), 12), Fraction(r * r * (r - 2), 24)))
            continue
        assert cK.coeffs == (1, -r // 2, Fraction(r * (r + 1), 12))
        assert cE.coeffs == (1, r // 2, Fraction(r * (2 * r - 1), 12), Fraction(r * r * (r - 2), 24))


def test_boundary_rejects_odd():
    with pytest.raises(OddRankError):
        chern_boundary_l3(7)


def test_cokernel_sequence():
    cK, cE = chern_boundary_l3(8)
    cN = cokernel_chern(cE, 10)
    assert chern_product(cE, cN) == ChernVector.twisted_trivial(10, 3)


def test_chern_bounds_check_examples():
    _, cE = chern_boundary_l3(8)
    assert chern_bounds_check(cE, 8)
    assert chern_bounds_check(ChernVector.of(1, 4, 16, 64), 8)
    assert not chern_bounds_check(ChernVector.of(1, 4, -1), 8)


def test_from_splitting():
    assert ChernVector.from_splitting([1, 1, 0, 0], 3) == ChernVector.of(1, 2, 1, 0)
    assert ChernVector.from_splitting([-1], 2) == ChernVector.of(1, -1, 0)


# -- self-duality relations ----------------------------------------------------------

def test_first_and_third_relations():
    for r in range(2, 13, 2):
        rels = selfdual_relations(r, 3)
        assert rels[0].coeffs == (1, 0, 0) and rels[0].rhs == Fraction(r, 2)
        assert rels[1].coeffs == (0, r - 2, -2) and rels[1].rhs == Fraction(r * (r - 1) * (r - 2), 12)


def test_second_relation_is_trivial():
    for r in range(2, 13, 2):
        assert selfdual_relation(r, 2, 3).substitute_e1(Fraction(r, 2)).is_trivial()


def test_odd_rank_rejected():
    for r in (1, 3, 5, 11):
        with pytest.raises(OddRankError):
            selfdual_relations(r, 3)


def test_relations_hold_on_uniform_splitting():
    for r in range(2, 13, 2):
        for l in range(1, 5):
            e = ChernVector.from_splitting([1] * (r // 2) + [0] * (r // 2), l).coeffs[1:]
            assert all(rel.holds(e) for rel in selfdual_relations(r, l))


def test_independent_relation_count():
    for r in range(2, 13, 2):
        for l in range(1, 7):
            assert independent_relation_count(r, l) == (l + 1) // 2


def test_relation_text():
    assert [str(x) for x in selfdual_relations(8, 3)] == ["e1 = 4", "6e2 - 2e3 = 28"]


# -- determinant ---------------------------------------------------------------------

def test_westwick_examples():
    W = westwick_matrix(2, 2, 2)
    assert W.matrix.entries == ((2,),) and W.det == 2
    W = westwick_matrix(3, 4, 2)
    assert W.matrix.entries == ((4, 6), (1, 4)) and W.det == 10
    assert W.stated_product == 1


def test_westwick_sweep_nonzero_and_box_count():
    cases = 0
    for n in range(2, 11):
        for m in range(2, n + 1):
            for r in range(2, m + 1):
                W = westwick_matrix(m, n, r)
                assert W.det != 0
                assert W.det == macmahon_box(m - r + 1, n - r + 1, r - 1) == westwick_closed_form(m, n, r)
                cases += 1
    assert cases == 165


def test_westwick_det_matches_sympy():
    for m, n, r in ((4, 6, 2), (5, 7, 3), (6, 9, 2)):
        W = westwick_matrix(m, n, r)
        assert W.det == sympy.Matrix([[int(x) for x in row] for row in W.matrix.entries]).det()


def test_westwick_rejects_bad_range():
    with pytest.raises(ValueError):
        westwick_matrix(3, 2, 2)


# -- bounds and codimensions -------------------------------------------------------------

def test_bounds_examples():
    q = BoundQuery(2, 3, 4)
    assert bound_value(q, UPPER, "l") == 4
    assert bound_value(q, EXACT, "l") == 3
    cond = [e for e in bounds_table(q) if e.status == CONDITIONAL][0]
    assert cond.condition.endswith("holds")
    assert bound_value(BoundQuery(5, 9, symmetry="symmetric"), EXACT, "c") == 1
    assert bound_value(BoundQuery(4, 9, symmetry="symmetric"), EXACT, "c") == 6


def test_divisibility_failure_is_reported():
    # (r, m, n) = (2, 4, 4): 3 divides 3!/1! = 6, so the criterion does not apply
    q = BoundQuery(2, 4, 4)
    cond = [e for e in bounds_table(q) if e.status == CONDITIONAL][0]
    assert cond.condition.endswith("fails")
    assert bound_value(q, EXACT, "l") is None


def test_special_triple():
    assert bound_value(BoundQuery(3, 4, 5), EXACT, "l") in (3, 4)
    assert any(e.value == 4 and "special" in e.reason for e in bounds_table(BoundQuery(3, 4, 5)))


def test_lower_never_exceeds_upper():
    for sym in ("general", "symmetric", "skew"):
        for m in range(2, 10):
            for r in range(1, m + 1):
                for n in ([m, m + 1, m + 3] if sym == "general" else [None]):
                    entries = bounds_table(BoundQuery(r, m, n, sym))
                    for prefix in {e.quantity.split("(")[0] for e in entries}:
                        lows = [e.value for e in entries if e.status in (LOWER, EXACT)
                                and e.quantity.split("(")[0] == prefix]
                        ups = [e.value for e in entries if e.status == UPPER and e.quantity.split("(")[0] == prefix]
                        if lows and ups:
                            assert max(lows) <= min(ups)


def test_codim_examples():
    assert codim_table(2, 3, 4).general == 2
    c = codim_table(4, 4)
    assert (c.general, c.symmetric, c.skew) == (0, 0, 0)
    for a in range(2, 8):
        assert skew_codim(2 * a - 2, 2 * a + 1) == 3
    with pytest.raises(ValueError):
        skew_codim(3, 5)


def test_codim_formulas_sweep():
    for m in range(1, 9):
        for n in range(m, m + 3):
            for r in range(0, m + 1):
                c = codim_table(r, m, n)
                assert c.general == (m - r) * (n - r)
                assert c.symmetric == comb(m - r + 1, 2)
                assert c.skew == (None if r % 2 else comb(m - r, 2))


# -- quadric Betti numbers ---------------------------------------------------------------

def test_betti_examples():
    assert quadric_betti_numbers(4) == [1, 0, 2, 0, 1] and quadric_euler(4) == 4
    assert quadric_betti_numbers(3)[:3] == [1, 0, 1] and quadric_euler(3) == 2
    with pytest.raises(ValueError):
        quadric_betti(3, 3)


@pytest.mark.parametrize("q", [3, 5])
def test_betti_from_point_counts(q):
    for r in range(2, 7 if q == 3 else 5):
        b = quadric_betti_numbers(r)
        assert split_quadric_points(r, q) == sum(b[2 * i] * q ** i for i in range(r - 1))
        assert all(b[i] == 0 for i in range(1, len(b), 2))


def test_euler_sweep():
    for r in range(2, 21):
        b = quadric_betti_numbers(r)
        assert quadric_euler(r) == sum((-1) ** i * x for i, x in enumerate(b))
        assert quadric_euler(r) == (r if r % 2 == 0 else r - 1)
