import random
from math import comb

import pytest

from crank.constructions import (Ambient, band_space, double, permutation_sign, random_subspace, subsets,
                                 volume_pairing, wedge_selfdual, wedge_space, wedge_vector, westwick_space)
from crank.field import GF, QQ
from crank.linalg import DenseMatrix, mat_det, mat_kernel, mat_rank
from crank.matspace import SKEW, SYMMETRIC, constant_rank_check, from_basis, min_rank_exhaustive


def wedge_product(v, alpha_coords, m, k):
    """Oracle: coordinates of v ^ alpha computed term by term with explicit sorting."""
    out = {T: 0 for T in subsets(m, k + 1)}
    for S, a in zip(subsets(m, k), alpha_coords):
        for i, vi in enumerate(v):
            if i in S or not vi or not a:
                continue
            seq = [i] + list(S)
            sign = 1
            for x in range(len(seq)):  # bubble sort, counting swaps
                for y in range(len(seq) - 1 - x):
                    if seq[y] > seq[y + 1]:
                        seq[y], seq[y + 1] = seq[y + 1], seq[y]
                        sign = -sign
            out[tuple(seq)] += sign * vi * a
    return [out[T] for T in subsets(m, k + 1)]


def test_ambient_parse_and_basis():
    assert str(Ambient.parse("hom(3, 4)")) == "hom(3,4)"
    assert Ambient.parse("sym(4)").dim == 10
    assert Ambient.parse("skew(5)").dim == 10
    for bad in ("sym(3,4)", "hom(3)", "foo(2)"):
        with pytest.raises(ValueError):
            Ambient.parse(bad)
    amb = Ambient.parse("skew(4)")
    B = amb.basis(QQ)
    assert all(M.is_skew() for M in B)
    M = B[0].scale(2) + B[3]
    assert amb.coordinates(M) == [2, 0, 0, 1, 0, 0]


def test_double_examples():
    I = from_basis(QQ, 2, 2, [DenseMatrix.identity(QQ, 2)])
    D = double(I)
    assert D.k == 1 and D.symmetry == SYMMETRIC and mat_rank(D.basis[0]) == 4
    S = double(band_space(2, 4, certify=False), skew=True)
    assert S.symmetry == SKEW and S.m == 6 and S.k == 3
    c = constant_rank_check(double(band_space(2, 4, GF(5), certify=False)), 4)
    assert c.constant and c.status == "proven"


def test_double_preserves_certified_rank():
    for r, n in ((1, 3), (2, 3), (2, 4)):
        A = band_space(r, n, GF(3))
        assert A.metadata["certificate"]["constant"]
        c = constant_rank_check(double(A), 2 * r)
        assert c.constant and c.status == "proven"


def test_band_examples():
    A = band_space(2, 4)
    assert (A.m, A.n, A.k) == (2, 4, 3)
    assert A.metadata["certificate"]["status"] == "proven"
    assert band_space(3, 3).k == 1
    row = band_space(1, 4)
    assert row.k == 4 and (row.m, row.n) == (1, 4)
    assert min_rank_exhaustive(band_space(2, 4, GF(3))) == 2
    with pytest.raises(ValueError):
        band_space(3, 2)


def test_band_dimension_matches_lower_bound():
    for r in range(1, 4):
        for n in range(r, r + 3):
            assert band_space(r, n, certify=False).k == n - r + 1


def test_wedge_space_examples():
    W = wedge_space(3, 1)
    assert (W.k, W.m, W.n) == (3, 3, 3)
    assert constant_rank_check(W, 2).constant
    W5 = wedge_space(5, 2)
    assert (W5.k, W5.m, W5.n) == (5, 10, 10)
    with pytest.raises(ValueError):
        wedge_space(3, 3)


def test_wedge_kernel_dimension():
    rng = random.Random(4)
    for m, k in ((4, 1), (4, 2), (5, 2), (5, 3)):
        W = wedge_space(m, k)
        v = [rng.randint(-9, 9) for _ in range(m)]
        assert len(mat_kernel(W.element(v))) == comb(m - 1, k - 1)


def test_wedge_space_is_wedge_multiplication():
    rng = random.Random(7)
    for m, k in ((4, 1), (4, 2), (5, 2)):
        W = wedge_space(m, k)
        v = [rng.randint(-5, 5) for _ in range(m)]
        alpha = [rng.randint(-5, 5) for _ in range(comb(m, k))]
        assert list(W.element(v).apply(alpha)) == wedge_product(v, alpha, m, k)


def test_wedge_rank_identity():
    for m in range(2, 13):
        for k in range(1, m):
            assert comb(m, k) - comb(m - 1, k - 1) == comb(m - 1, k)


def test_permutation_sign():
    assert permutation_sign((0, 1, 2)) == 1
    assert permutation_sign((1, 0, 2)) == -1
    assert permutation_sign((2, 0, 1)) == 1
    assert permutation_sign((0, 0, 1)) == 0
    assert wedge_vector((2, 0)) == ((0, 2), -1)


def test_wedge_selfdual_examples():
    A1 = wedge_selfdual(1)
    assert A1.symmetry == SKEW and (A1.k, A1.m) == (3, 3)
    assert constant_rank_check(A1, 2).status == "proven"
    A2 = wedge_selfdual(2)
    assert A2.symmetry == SYMMETRIC and (A2.k, A2.m) == (5, 10)
    assert constant_rank_check(A2.reduce_mod(5), 6).constant
    A3 = wedge_selfdual(3, GF(3))
    assert A3.symmetry == SKEW and (A3.k, A3.m) == (7, 35)


def test_wedge_selfdual_parity_sign():
    for a in (1, 2, 3):
        A = wedge_selfdual(a, GF(7))
        for B in A.basis:
            assert B.T == (B if a % 2 == 0 else -B)


def test_wedge_selfdual_composes_with_volume_pairing():
    # pairing (T, S) -> vol(e_T ^ e_S) composed with e_u ^ (.) gives the transposed self-dual matrix
    for a in (1, 2, 3):
        m = 2 * a + 1
        W = wedge_space(m, a)
        V = volume_pairing(m, a + 1)
        S = wedge_selfdual(a)
        assert mat_det(V) != 0
        for u in range(m):
            assert (V @ W.basis[u]).T == S.basis[u]


def test_westwick_examples():
    W1 = westwick_space(1)
    assert W1.k == 3 and W1.metadata["tries"] == 0
    W2 = westwick_space(2, GF(5), seed=1)
    assert W2.k == 3 and W2.symmetry == SKEW and W2.metadata["tries"] >= 1
    c = constant_rank_check(W2, 4)
    assert c.constant and c.status == "proven"
    assert westwick_space(2, GF(5), seed=1) == W2


def test_random_subspace_examples():
    A = random_subspace(GF(5), "sym(4)", 3, seed=2)
    assert A.k == 3 and A.symmetry == SYMMETRIC
    assert min_rank_exhaustive(A) >= 2
    full = random_subspace(QQ, "skew(4)", 6)
    assert full.k == 6
    assert random_subspace(GF(5), "hom(2,3)", 4, seed=9) == random_subspace(GF(5), "hom(2,3)", 4, seed=9)
    with pytest.raises(ValueError):
        random_subspace(QQ, "sym(2)", 4)
