"""Builders for the standard families of constant-rank spaces.

Wedge bases index ``Lambda^k`` of ``F^m`` by ``k``-subsets of
``{0, ..., m-1}`` in lexicographic order; the sign of a wedge product of
basis vectors is ``(-1)^(inversions)`` of the concatenated index list.
"""

from __future__ import annotations

import random
import re
from dataclasses import dataclass
from itertools import combinations
from typing import Sequence

from crank._util import subseed
from crank.field import QQ, FieldSpec
from crank.linalg import DenseMatrix, rank_of
from crank.matspace import (GENERAL, SKEW, SYMMETRIC, DependentBasis, MatrixSpace, constant_rank_check,
                            from_basis)


class CertificationFailure(RuntimeError):
    """A construction did not certify as constant rank."""


# -- ambient spaces -------------------------------------------------------------

@dataclass(frozen=True)
class Ambient:
    kind: str  # "hom", "sym" or "skew"
    m: int
    n: int

    @classmethod
    def parse(cls, text: str) -> "Ambient":
        """``hom(3,4)``, ``sym(4)`` or ``skew(5)``."""
        mt = re.fullmatch(r"\s*(hom|sym|skew)\s*\(\s*(\d+)\s*(?:,\s*(\d+)\s*)?\)\s*", text)
        if not mt:
            raise ValueError(f"cannot parse ambient {text!r}; use hom(m,n), sym(m) or skew(m)")
        kind, m, n = mt.group(1), int(mt.group(2)), mt.group(3)
        if kind == "hom":
            if n is None:
                raise ValueError("hom ambient needs two sizes")
            return cls(kind, m, int(n))
        if n is not None and int(n) != m:
            raise ValueError(f"{kind} ambient is square")
        return cls(kind, m, m)

    def __str__(self) -> str:
        return f"hom({self.m},{self.n})" if self.kind == "hom" else f"{self.kind}({self.m})"

    @property
    def dim(self) -> int:
        m = self.m
        return {"hom": m * self.n, "sym": m * (m + 1) // 2, "skew": m * (m - 1) // 2}[self.kind]

    @property
    def symmetry(self) -> str:
        return {"hom": GENERAL, "sym": SYMMETRIC, "skew": SKEW}[self.kind]

    def basis(self, field: FieldSpec) -> list[DenseMatrix]:
        """Standard basis in a fixed order: entries ``(i, j)`` with ``i <= j`` (sym), ``i < j`` (skew)."""
        m, n = self.m, self.n
        out = []
        if self.kind == "hom":
            for i in range(m):
                for j in range(n):
                    out.append(DenseMatrix.unit(field, m, n, i, j))
        else:
            for i in range(m):
                for j in range(i if self.kind == "sym" else i + 1, m):
                    g = [[0] * m for _ in range(m)]
                    g[i][j] = 1
                    g[j][i] = 1 if self.kind == "sym" else -1
                    out.append(DenseMatrix.from_rows(field, g))
        return out

    def coordinates(self, M: DenseMatrix) -> list:
        """Coordinates of ``M`` in :meth:`basis` order."""
        m = self.m
        if self.kind == "hom":
            return list(M.flatten())
        start = 0 if self.kind == "sym" else 1
        return [M.entries[i][j] for i in range(m) for j in range(i + start, m)]


# -- doubling and bands ------------------------------------------------------------

def double(A: MatrixSpace, skew: bool = False) -> MatrixSpace:
    """Block anti-diagonal embedding ``[[0, B], [B^T, 0]]`` (or ``[[0, B], [-B^T, 0]]``)."""
    F = A.field
    m, n = A.m, A.n
    N = m + n
    mats = []
    for B in A.basis:
        g = [[F.zero] * N for _ in range(N)]
        for i in range(m):
            for j in range(n):
                v = B.entries[i][j]
                g[i][m + j] = v
                g[m + j][i] = F.norm(-v) if skew else v
        mats.append(DenseMatrix(F, N, N, tuple(tuple(r) for r in g)))
    out = from_basis(F, N, N, mats)
    want = SKEW if skew else SYMMETRIC
    if out.symmetry != want:
        raise AssertionError(f"doubled space tagged {out.symmetry}, expected {want}")
    return out.with_metadata(family="double", variant="skew" if skew else "symmetric")


def band_space(r: int, n: int, field: FieldSpec = QQ, certify: bool = True) -> MatrixSpace:
    """``M(x)[i][j] = x_{j-i}`` for ``0 <= j-i <= n-r``: an ``(n-r+1)``-dimensional space of ``r x n``."""
    if not 1 <= r <= n:
        raise ValueError(f"band space needs 1 <= r <= n, got r={r}, n={n}")
    mats = [[[1 if j - i == s else 0 for j in range(n)] for i in range(r)] for s in range(n - r + 1)]
    A = from_basis(field, r, n, [DenseMatrix.from_rows(field, g) for g in mats])
    md = {"family": "band", "params": {"r": r, "n": n}}
    if certify:
        cert = constant_rank_check(A, r)
        if not cert.constant:
            raise CertificationFailure(f"band({r},{n}) failed constant-rank certification")
        md["certificate"] = cert.to_json()
    return A.with_metadata(**md)


# -- wedge constructions ---------------------------------------------------------------

def subsets(m: int, k: int) -> list[tuple]:
    """``k``-subsets of ``range(m)`` in lexicographic order."""
    return list(combinations(range(m), k))


def permutation_sign(seq: Sequence[int]) -> int:
    """``(-1)^(inversions)``, or 0 when an index repeats."""
    if len(set(seq)) < len(seq):
        return 0
    inv = sum(1 for a in range(len(seq)) for b in range(a + 1, len(seq)) if seq[a] > seq[b])
    return -1 if inv % 2 else 1


def wedge_vector(indices: Sequence[int]) -> tuple[tuple, int]:
    """``e_{i1} ^ ... ^ e_{ik}`` as ``(sorted subset, sign)``."""
    return tuple(sorted(indices)), permutation_sign(indices)


def wedge_space(m: int, k: int, field: FieldSpec = QQ) -> MatrixSpace:
    """The maps ``alpha -> e_i ^ alpha`` from ``Lambda^k`` to ``Lambda^(k+1)``, for ``i < m``."""
    if not 1 <= k <= m - 1:
        raise ValueError(f"wedge space needs 1 <= k <= m-1, got m={m}, k={k}")
    rows = subsets(m, k + 1)
    cols = subsets(m, k)
    row_index = {T: a for a, T in enumerate(rows)}
    mats = []
    for i in range(m):
        g = [[0] * len(cols) for _ in rows]
        for b, S in enumerate(cols):
            if i not in S:
                T, sign = wedge_vector((i,) + S)
                g[row_index[T]][b] = sign
        mats.append(DenseMatrix.from_rows(field, g))
    return from_basis(field, len(rows), len(cols), mats).with_metadata(
        family="wedge", params={"m": m, "k": k})


def wedge_selfdual(a: int, field: FieldSpec = QQ) -> MatrixSpace:
    """``v -> (alpha, beta) -> v ^ alpha ^ beta`` on ``Lambda^a`` of ``F^(2a+1)``.

    Composes :func:`wedge_space` with the volume-form pairing
    ``Lambda^(a+1) x Lambda^a -> F``; entry ``[A][B]`` of basis matrix ``u``
    is the coefficient of ``e_0 ^ ... ^ e_(2a)`` in ``e_u ^ e_A ^ e_B``.
    Symmetric for even ``a``, skew for odd ``a``.
    """
    if a < 1:
        raise ValueError("a must be at least 1")
    m = 2 * a + 1
    idx = subsets(m, a)
    mats = []
    for u in range(m):
        g = [[permutation_sign((u,) + A + B) for B in idx] for A in idx]
        mats.append(DenseMatrix.from_rows(field, g))
    out = from_basis(field, len(idx), len(idx), mats)
    want = SYMMETRIC if a % 2 == 0 else SKEW
    if out.symmetry != want:
        raise AssertionError(f"wedge_selfdual({a}) tagged {out.symmetry}, expected {want}")
    return out.with_metadata(family="wedge_selfdual", params={"a": a})


def volume_pairing(m: int, k: int, field: FieldSpec = QQ) -> DenseMatrix:
    """Matrix of ``Lambda^(m-k) x Lambda^k -> F``, ``(T, S) -> coefficient of the volume form in e_T ^ e_S``."""
    return DenseMatrix.from_rows(field, [[permutation_sign(T + S) for S in subsets(m, k)]
                                         for T in subsets(m, m - k)])


# -- Westwick planes -------------------------------------------------------------------

WESTWICK_HEIGHT = 3


def westwick_space(a: int, field: FieldSpec = QQ, seed: int = 0, max_tries: int = 100) -> MatrixSpace:
    """A 3-dimensional skew space of ``(2a+1) x (2a+1)`` matrices of constant rank ``2a``.

    ``a = 1`` returns all of the skew 3x3 matrices.  Otherwise random planes
    (integer coefficients in ``[-3, 3]`` over Q, uniform over F_q) are drawn
    until one certifies; the try count is recorded in the metadata.
    """
    if a < 1:
        raise ValueError("a must be at least 1")
    amb = Ambient("skew", 2 * a + 1, 2 * a + 1)
    if a == 1:
        A = from_basis(field, 3, 3, amb.basis(field))
        return A.with_metadata(family="westwick", params={"a": 1}, tries=0)
    E = amb.basis(field)
    for attempt in range(1, max_tries + 1):
        rng = random.Random(subseed(seed, f"westwick:{a}:{attempt}"))
        mats = []
        for _ in range(3):
            c = [field.random_element(rng, WESTWICK_HEIGHT) for _ in E]
            M = DenseMatrix.zeros(field, amb.m, amb.m)
            for ci, B in zip(c, E):
                if ci:
                    M = M + B.scale(ci)
            mats.append(M)
        try:
            A = from_basis(field, amb.m, amb.m, mats)
        except DependentBasis:
            continue
        cert = constant_rank_check(A, 2 * a, seed=seed)
        if cert.constant:
            return A.with_metadata(family="westwick", params={"a": a}, seed=seed, tries=attempt,
                                   certificate=cert.to_json())
    raise CertificationFailure(f"no certified Westwick plane for a={a} in {max_tries} tries")


# -- random subspaces ---------------------------------------------------------------

def random_subspace(field: FieldSpec, ambient: Ambient | str, dim: int, seed: int = 0,
                    height: int = 100) -> MatrixSpace:
    """Seeded random ``dim``-dimensional subspace; dependent draws are redrawn."""
    amb = Ambient.parse(ambient) if isinstance(ambient, str) else ambient
    if not 1 <= dim <= amb.dim:
        raise ValueError(f"dimension {dim} outside 1..{amb.dim}")
    E = amb.basis(field)
    if dim == amb.dim:
        return from_basis(field, amb.m, amb.n, E).with_metadata(redraws=0)
    rng = random.Random(subseed(seed, f"random_subspace:{amb}:{dim}"))
    redraws = 0
    while True:
        coeffs = [[field.random_element(rng, height) for _ in E] for _ in range(dim)]
        if rank_of(field, coeffs) == dim:
            break
        redraws += 1
    mats = []
    for c in coeffs:
        M = DenseMatrix.zeros(field, amb.m, amb.n)
        for ci, B in zip(c, E):
            if ci:
                M = M + B.scale(ci)
        mats.append(M)
    return from_basis(field, amb.m, amb.n, mats).with_metadata(redraws=redraws)
