from collections import Counter
from fractions import Fraction

import pytest
import sympy
from hypothesis import given, strategies as st

from crank.constructions import band_space, double, wedge_space, westwick_space
from crank.field import GF, QQ
from crank.linalg import DenseMatrix, mat_rank, random_matrix
from crank.poly import (BinaryFormMatrix, MultiPoly, PolyMatrix, evaluate, gcd_univariate, minor_index, minors,
                        multiplication_matrix, multiplication_matrix_pencil, poly_det, restrict_to_line,
                        symbolic_rank)


def x(i, n=2, F=QQ):
    return MultiPoly.variable(F, n, i)


def uni(*coeffs, F=QQ):
    return MultiPoly.univariate(F, coeffs)


def diag_x(F=QQ):
    z = MultiPoly.constant(F, 2, 0)
    return PolyMatrix(F, 2, ((x(0, F=F), z), (z, x(1, F=F))))


def test_multipoly_drops_zero_terms():
    p = MultiPoly(QQ, 2, {(1, 0): 1, (0, 1): 0})
    assert p.terms == {(1, 0): 1}
    assert not (p - p)


def test_multipoly_arithmetic():
    p = x(0) + x(1)
    q = x(0) - x(1)
    assert p * q == x(0) ** 2 - x(1) ** 2
    assert (p * q).divexact(p) == q
    assert (p ** 3).degree() == 3 and (p ** 3).is_homogeneous(3)


def test_multipoly_json_round_trip():
    p = x(0).scale(3) - x(1) ** 2
    assert MultiPoly.from_json(QQ, 2, p.to_json()) == p
    assert {"exponents": [1, 0], "coeff": "3"} in p.to_json()


def test_evaluate_identity_scaled():
    F = QQ
    z = MultiPoly.constant(F, 1, 0)
    P = PolyMatrix(F, 1, ((x(0, 1), z), (z, x(0, 1))))
    assert evaluate(P, [5]) == DenseMatrix.diag(F, [5, 5])


def test_evaluate_pencil_at_unit_point():
    A = random_matrix(QQ, 3, 4, 1)
    B = random_matrix(QQ, 3, 4, 2)
    P = PolyMatrix.from_linear([A, B])
    assert evaluate(P, [1, 0]) == A
    assert evaluate(P, [0, 1]) == B
    with pytest.raises(ValueError):
        evaluate(P, [1, 0, 0])


def test_wedge_polymatrix_rank_at_random_point():
    F = GF(5)
    A = wedge_space(4, 2, F)
    P = PolyMatrix.from_linear(list(A.basis))
    M = evaluate(P, [1, 2, 3, 4])
    assert mat_rank(M) == 3  # C(m-1, k)


def test_restrict_identity_substitution():
    A = random_matrix(QQ, 2, 3, 3)
    B = random_matrix(QQ, 2, 3, 4)
    P = PolyMatrix.from_linear([A, B])
    L = restrict_to_line(P, [1, 0], [0, 1])
    assert L.s_part == A and L.t_part == B


def test_restrict_rejects_dependent_points():
    P = PolyMatrix.from_linear([random_matrix(QQ, 2, 2, 5), random_matrix(QQ, 2, 2, 6)])
    with pytest.raises(ValueError):
        restrict_to_line(P, [1, 2], [1, 2])
    with pytest.raises(ValueError):
        restrict_to_line(P, [1, 2], [2, 4])


@given(st.integers(-5, 5), st.integers(-5, 5), st.integers(0, 100))
def test_restriction_commutes_with_evaluation(sigma, tau, seed):
    F = QQ
    P = PolyMatrix.from_linear([random_matrix(F, 3, 3, seed + i, height=5) for i in range(3)])
    p, q = [1, 2, 0], [0, 1, -1]
    L = restrict_to_line(P, p, q)
    assert evaluate(L, [sigma, tau]) == evaluate(P, [sigma * a + tau * b for a, b in zip(p, q)])


def test_westwick_line_stays_constant_rank():
    F = GF(5)
    W = westwick_space(2, F, seed=0)
    P = PolyMatrix.from_linear(list(W.basis))
    L = restrict_to_line(P, [1, 2, 3], [0, 1, 4])
    ranks = {mat_rank(evaluate(L, [1, t])) for t in range(5)} | {mat_rank(evaluate(L, [0, 1]))}
    assert ranks == {4}


def test_minors_of_diagonal():
    P = diag_x()
    m1 = minors(P, 1)
    assert Counter(map(repr, m1)) == Counter(map(repr, [x(0), x(1), x(0) - x(0), x(0) - x(0)]))
    assert m1 == [x(0), MultiPoly(QQ, 2), MultiPoly(QQ, 2), x(1)]
    assert minors(P, 2) == [x(0) * x(1)]
    with pytest.raises(ValueError):
        minors(P, 3)
    assert minor_index(2, 2, 1) == [((0,), (0,)), ((0,), (1,)), ((1,), (0,)), ((1,), (1,))]


def test_doubled_band_rank_five_minors_vanish():
    A = double(band_space(2, 4, certify=False))
    P = PolyMatrix.from_linear(list(A.basis))
    assert all(not m for m in minors(P, 5))
    assert any(m for m in minors(P, 4))


def test_minors_match_sympy_determinants():
    A, B = random_matrix(QQ, 3, 3, 10, 5), random_matrix(QQ, 3, 3, 11, 5)
    P = PolyMatrix.from_linear([A, B])
    s, t = sympy.symbols("s t")
    M = sympy.Matrix(3, 3, lambda i, j: int(A.entries[i][j]) * s + int(B.entries[i][j]) * t)
    ours = minors(P, 3)[0]
    expected = sympy.Poly(M.det(), s, t)
    assert {k: int(v) for k, v in ours.terms.items()} == {k: int(v) for k, v in expected.as_dict().items()}


@given(st.integers(0, 10**6), st.sampled_from([2, 3]))
def test_laplace_expansion_first_row(seed, t):
    F = QQ
    P = PolyMatrix.from_linear([random_matrix(F, t + 1, t + 1, seed + i, height=4) for i in range(2)])
    E = P.entries
    total = MultiPoly(F, 2)
    for j in range(t + 1):
        sub = [[E[i][c] for c in range(t + 1) if c != j] for i in range(1, t + 1)]
        term = E[0][j] * poly_det(sub)
        total = total + term if j % 2 == 0 else total - term
    assert total == poly_det([list(r) for r in E])


def test_gcd_examples():
    assert gcd_univariate([uni(-1, 0, 1), uni(-1, 1)]) == uni(-1, 1)
    assert gcd_univariate([uni(0, 1), uni(1, 1)]) == uni(1)
    assert gcd_univariate([uni(0), uni(0)]) == uni()
    assert gcd_univariate([], field=QQ) == uni()
    assert gcd_univariate([uni(2, 4)]) == uni(Fraction(1, 2), 1)


def test_gcd_monic_over_qq_and_fp():
    g = gcd_univariate([uni(2, 4), uni(4, 8, 0)])
    assert g.dense()[-1] == 1 and g.degree() == 1
    F = GF(5)
    g = gcd_univariate([uni(2, 3, F=F), uni(4, 1, F=F) * uni(2, 3, F=F)])
    assert g.dense() == [4, 1]  # (3t + 2)/3 = t + 4 mod 5


def test_gcd_rejects_multivariate():
    with pytest.raises(ValueError):
        gcd_univariate([x(0)])


def test_gcd_of_minors_locates_drop():
    F = QQ
    t = MultiPoly.variable(F, 1, 0)
    one = MultiPoly.constant(F, 1, 1)
    zero = MultiPoly.constant(F, 1, 0)
    P = PolyMatrix(F, 1, ((t, zero), (zero, one)))
    g = gcd_univariate(minors(P, 2))
    assert g == t and g.evaluate([0]) == 0


def test_multiplication_matrix_examples():
    F = QQ
    s = BinaryFormMatrix.from_pencil(DenseMatrix.from_rows(F, [[1]]), DenseMatrix.from_rows(F, [[0]]))
    assert multiplication_matrix(s, 0).entries == ((1,), (0,))
    st_ = BinaryFormMatrix.from_pencil(DenseMatrix.from_rows(F, [[1]]), DenseMatrix.from_rows(F, [[1]]))
    assert multiplication_matrix(st_, 0).entries == ((1,), (1,))
    with pytest.raises(ValueError):
        multiplication_matrix(s, -1)


def test_multiplication_matrix_shape_and_westwick_corank():
    W = westwick_space(1)
    X, Y = W.basis[0], W.basis[1]
    for d, corank in ((0, 0), (1, 1)):
        M = multiplication_matrix_pencil(X, Y, d)
        assert M.shape == (3 * (d + 2), 3 * (d + 1))
        assert M.cols - mat_rank(M) == corank


@given(st.integers(0, 10**6))
def test_kernel_sections_grow_convexly(seed):
    F = GF(7)
    X = random_matrix(F, 3, 5, seed)
    Y = random_matrix(F, 3, 5, seed + 1)
    h = [X.cols * (d + 1) - mat_rank(multiplication_matrix_pencil(X, Y, d)) for d in range(4)]
    h = [0] + h
    diffs = [b - a for a, b in zip(h, h[1:])]
    assert all(b >= a for a, b in zip(diffs, diffs[1:]))
    assert all(0 <= d <= X.cols - min(X.rows, X.cols) for d in diffs)


def test_binary_form_matrix_validates_degree():
    F = QQ
    with pytest.raises(ValueError):
        BinaryFormMatrix(F, 2, ((MultiPoly.constant(F, 2, 1),),))
