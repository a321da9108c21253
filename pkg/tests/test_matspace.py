import itertools
import json
import random

import pytest
from hypothesis import given, strategies as st

from crank._util import BudgetExceeded
from crank.constructions import band_space, double, wedge_selfdual, wedge_space, westwick_space
from crank.field import GF, QQ
from crank.linalg import DenseMatrix, mat_rank, random_matrix
from crank.matspace import (SKEW, SYMMETRIC, DependentBasis, MatrixSpace, RankCertificate, bounded_rank_check,
                            closure_rank_drop, constant_rank_check, exhaustive_scan, from_basis, generic_rank,
                            min_rank_exhaustive, min_rank_pencil, pencil_min_rank, point_from_index,
                            projective_count, to_polymatrix)
from crank.poly import evaluate


def space(F, mats):
    mats = [DenseMatrix.from_rows(F, g) for g in mats]
    return from_basis(F, mats[0].rows, mats[0].cols, mats)


def brute_min_rank(A):
    """Independent oracle: every nonzero coefficient vector, no projective normalisation."""
    q = A.field.p
    return min(mat_rank(A.element(c)) for c in itertools.product(range(q), repeat=A.k) if any(c))


def test_from_basis_tags_and_validation():
    assert space(QQ, [[[1, 0], [0, 1]]]).symmetry == SYMMETRIC
    assert space(QQ, [[[0, 1], [-1, 0]]]).symmetry == SKEW
    with pytest.raises(DependentBasis):
        space(QQ, [[[1, 0], [0, 1]], [[1, 0], [0, 1]]])
    with pytest.raises(ValueError):
        from_basis(QQ, 2, 2, [DenseMatrix.zeros(QQ, 2, 3)])
    with pytest.raises(ValueError):
        from_basis(QQ, 2, 2, [])


def test_json_round_trip_and_symmetry_validation():
    A = double(band_space(2, 4, certify=False))
    data = json.loads(json.dumps(A.to_json()))
    assert MatrixSpace.from_json(data) == A
    data["symmetry"] = "skew"
    with pytest.raises(ValueError, match="symmetry"):
        MatrixSpace.from_json(data)
    data = A.to_json()
    data["basis"][1][0][0] = "1/0"
    with pytest.raises(ValueError, match=r"basis\[1\]"):
        MatrixSpace.from_json(data)


def test_to_polymatrix():
    A = space(QQ, [[[1, 0], [0, 1]]])
    assert evaluate(to_polymatrix(A), [7]) == DenseMatrix.diag(QQ, [7, 7])
    B = band_space(2, 4, certify=False)
    P = to_polymatrix(B)
    assert evaluate(P, [1, 2, 3]).entries == ((1, 2, 3, 0), (0, 1, 2, 3))


def test_doubling_structure():
    B = band_space(2, 4, certify=False)
    D = double(B)
    M = evaluate(to_polymatrix(D), [1, 2, 3])
    inner = evaluate(to_polymatrix(B), [1, 2, 3])
    assert tuple(r[2:] for r in M.entries[:2]) == inner.entries
    assert tuple(r[:2] for r in M.entries[2:]) == inner.T.entries
    assert M.is_symmetric() and mat_rank(M) == 2 * mat_rank(inner)


def test_generic_rank_examples():
    assert generic_rank(space(QQ, [[[1, 0, 0], [0, 1, 0], [0, 0, 1]]])).rank == 3
    assert generic_rank(wedge_space(5, 2)).rank == 6
    g = generic_rank(space(QQ, [[[1, 0], [0, 0]], [[0, 0], [0, 1]]]))
    assert g.rank == 2 and g.exact
    assert 0 < g.failure_bound < 1e-10


def test_bounded_rank_examples():
    assert not bounded_rank_check(space(QQ, [[[1, 0], [0, 1]]]), 1)
    assert bounded_rank_check(band_space(2, 4, certify=False), 2)
    assert bounded_rank_check(random_space(QQ, 3, 4, 3, 1), 3)
    assert not bounded_rank_check(band_space(2, 4, certify=False), 1)


def random_space(F, m, n, k, seed):
    rng = random.Random(seed)
    while True:
        try:
            return from_basis(F, m, n, [random_matrix(F, m, n, rng, height=5) for _ in range(k)])
        except DependentBasis:
            pass


@given(st.integers(0, 10**6), st.sampled_from([QQ, GF(3), GF(5)]))
def test_bounded_rank_agrees_with_generic_rank(seed, F):
    A = random_space(F, 3, 4, 2, seed)
    g = generic_rank(A, seed).rank
    assert bounded_rank_check(A, g)
    if g > 0:
        assert not bounded_rank_check(A, g - 1)


def test_bounded_rank_small_prime_fallback():
    # over F_3 with r = 2 the grid of size r + 2 does not fit; results must still be exact
    A = wedge_selfdual(1, GF(3))
    assert bounded_rank_check(A, 2) and not bounded_rank_check(A, 1)
    W = wedge_selfdual(2, GF(3))
    assert bounded_rank_check(W, 6) and not bounded_rank_check(W, 5)


def test_min_rank_exhaustive_examples():
    assert min_rank_exhaustive(space(GF(3), [[[1, 0, 0], [0, 1, 0], [0, 0, 1]]])) == 3
    W = wedge_space(3, 1, GF(3))
    scan = exhaustive_scan(W)
    assert scan.points == 13 and scan.min_rank == scan.max_rank == 2
    assert min_rank_exhaustive(space(GF(3), [[[1, 0], [0, 0]], [[0, 0], [0, 1]]])) == 1


def test_exhaustive_budget_guard():
    with pytest.raises(BudgetExceeded):
        exhaustive_scan(wedge_selfdual(2, GF(3)), budget=100)


def test_projective_enumeration_is_canonical():
    q, k = 3, 3
    pts = [tuple(point_from_index(q, k, j, i)) for j in range(k) for i in range(q ** (k - 1 - j))]
    assert len(pts) == projective_count(q, k) == len(set(pts))
    assert all(next(x for x in p if x) == 1 for p in pts)
    assert pts[0] == (1, 0, 0) and pts[1] == (1, 0, 1)


@given(st.integers(0, 10**6))
def test_exhaustive_matches_brute_force(seed):
    A = random_space(GF(3), 3, 3, 3, seed)
    assert min_rank_exhaustive(A) == brute_min_rank(A)


def test_exhaustive_witness_and_worker_invariance():
    A = space(GF(5), [[[1, 0], [0, 1]], [[0, 1], [1, 0]]])
    s1 = exhaustive_scan(A, 2, 2, workers=1)
    s4 = exhaustive_scan(A, 2, 2, workers=4)
    assert s1 == s4
    assert s1.witness is not None and mat_rank(A.element(s1.witness)) == 1


def test_min_rank_pencil_examples():
    drop = space(QQ, [[[1, 0], [0, 1]], [[0, 0], [0, 1]]])
    assert not min_rank_pencil(drop, 2)
    swap = space(QQ, [[[1, 0], [0, 1]], [[0, 1], [1, 0]]])
    assert not min_rank_pencil(swap, 2)
    W = westwick_space(1)
    line = from_basis(QQ, 3, 3, [W.element([1, 2, 3]), W.element([0, 1, -1])])
    assert min_rank_pencil(line, 2)
    with pytest.raises(ValueError):
        min_rank_pencil(W, 2)


def test_pencil_rational_versus_closure_over_fq():
    # x^2 + y^2 is anisotropic over F_3: no F_3-point drops, but the closure has one
    A = space(GF(3), [[[1, 0], [0, 1]], [[0, 1], [-1, 0]]])
    assert min_rank_pencil(A, 2)
    assert not min_rank_pencil(A, 2, closure=True)
    assert pencil_min_rank(A) == 2 and pencil_min_rank(A, closure=True) == 1


def test_closure_rank_drop():
    assert closure_rank_drop(band_space(2, 4, certify=False), 2) is False
    diag3 = space(QQ, [[[1, 0, 0], [0, 0, 0], [0, 0, 0]], [[0, 0, 0], [0, 1, 0], [0, 0, 0]],
                       [[0, 0, 0], [0, 0, 0], [0, 0, 1]]])
    assert closure_rank_drop(diag3, 3) is True


def test_constant_rank_examples():
    I3 = space(QQ, [[[1, 0, 0], [0, 1, 0], [0, 0, 1]]])
    c = constant_rank_check(I3, 3)
    assert c.constant and c.status == "proven"
    d = constant_rank_check(double(band_space(2, 4, GF(5), certify=False)), 4)
    assert d.constant and d.status == "proven" and d.mode.startswith("minors_exact+exhaustive")
    w = constant_rank_check(wedge_selfdual(2, GF(3)), 6)
    assert w.constant and w.status == "proven" and w.details["points"] == 121


def test_certificate_invariants_and_round_trip():
    for A, r in ((band_space(2, 4, certify=False), 2), (wedge_space(4, 1), 3),
                 (space(QQ, [[[1, 0], [0, 1]], [[0, 0], [0, 1]]]), 2)):
        c = constant_rank_check(A, r)
        assert c.min_nonzero_rank <= c.generic_rank <= c.max_rank
        if c.constant:
            assert c.min_nonzero_rank == c.max_rank == r
            assert bounded_rank_check(A, r) and not bounded_rank_check(A, r - 1)
        assert RankCertificate.from_json(json.loads(json.dumps(c.to_json()))) == c


def test_evidence_tier_when_macaulay_is_too_large():
    c = constant_rank_check(wedge_selfdual(2), 6)
    assert c.constant and c.status == "evidence" and c.mode == "minors_exact+monte_carlo"
    assert c.details["mod_p_min_rank"]["3"] == 6


def test_reduce_mod_p():
    A = band_space(2, 4, certify=False)
    assert A.reduce_mod(5).field == GF(5)
    with pytest.raises(ValueError):
        A.reduce_mod(5).reduce_mod(7)


def test_finite_field_closure_undecided_is_evidence():
    A = wedge_selfdual(2, GF(3))
    rational = constant_rank_check(A, 6)
    assert rational.constant and rational.status == "proven" and rational.details["points"] == 121
    closure = constant_rank_check(A, 6, scope="closure")
    assert closure.constant and closure.status == "evidence" and closure.details["closure_drop"] is None
