"""Quadric systems of the Segre threefold and of the Grassmannian G(2,5).

Coordinate conventions:

* Segre ``P^1 x P^2`` in ``P^5``: ``z = (alpha_0, alpha_1, alpha_2, w_0, w_1, w_2)``,
  the two columns of a 3 x 2 matrix.  A point is ``(lam*a, mu*a)``.
  Pairing ``F^3`` with its dual through the volume form, the doubled
  3 x 3 wedge system gives ``q_v(alpha, w) = 2 det(e_v, alpha, w)``.
* ``Lambda^2 F^5``: coordinates ``p_ij``, ``i < j`` in lexicographic order
  (0-based indices), signs from inversion counts.  A decomposable point is
  ``p_ij = v_i w_j - v_j w_i``.

A quadric ``q(z) = z^T M z`` is stored as its symmetric matrix ``M``; a
monomial ``z_a z_b`` with ``a != b`` contributes ``1/2`` at ``(a, b)`` and
``(b, a)``.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from crank._util import parallel_map, subseed
from crank.constructions import permutation_sign, subsets
from crank.field import QQ, FieldSpec
from crank.linalg import DenseMatrix, rank_of
from crank.matspace import SYMMETRIC, MatrixSpace, from_basis

SEGRE_POINTS = "segre_points"
DECOMPOSABLE = "decomposable_bivectors"
FAMILIES = (SEGRE_POINTS, DECOMPOSABLE)
SAMPLE_HEIGHT = 100


@dataclass(frozen=True)
class QuadricSystem:
    space: MatrixSpace
    labels: tuple

    def __post_init__(self):
        if self.space.symmetry != SYMMETRIC:
            raise ValueError("a quadric system needs symmetric matrices")
        if len(self.labels) != self.space.m:
            raise ValueError(f"{len(self.labels)} labels for {self.space.m} coordinates")

    @property
    def nvars(self) -> int:
        return self.space.m

    @property
    def dim(self) -> int:
        return self.space.k

    def evaluate(self, z: Sequence) -> list:
        """Values ``z^T M z`` of every quadric."""
        F = self.space.field
        z = [F(x) for x in z]
        out = []
        for M in self.space.basis:
            total = F.zero
            for i, row in enumerate(M.entries):
                if z[i]:
                    s = sum((row[j] * z[j] for j in range(len(z)) if row[j]), F.zero)
                    total = F.norm(total + z[i] * s)
            out.append(total)
        return out

    def to_json(self) -> dict:
        return {"labels": list(self.labels), "space": self.space.to_json()}

    @classmethod
    def from_json(cls, data: dict) -> "QuadricSystem":
        return cls(MatrixSpace.from_json(data["space"]), tuple(data["labels"]))


def quadric_from_monomials(field: FieldSpec, n: int, terms) -> DenseMatrix:
    """Symmetric matrix of ``sum c * z_a * z_b`` over ``(c, a, b)`` triples."""
    g = [[field.zero] * n for _ in range(n)]
    half = field.inv(field(2))
    for c, a, b in terms:
        c = field(c)
        if a == b:
            g[a][a] = field.norm(g[a][a] + c)
        else:
            g[a][b] = field.norm(g[a][b] + c * half)
            g[b][a] = field.norm(g[b][a] + c * half)
    return DenseMatrix(field, n, n, tuple(tuple(r) for r in g))


def as_quadric_system(A: MatrixSpace, labels: Sequence[str] | None = None) -> QuadricSystem:
    """Read a symmetric space as quadratic forms in its coordinates."""
    return QuadricSystem(A, tuple(labels) if labels is not None else tuple(f"z{i}" for i in range(A.m)))


def segre_labels() -> tuple:
    return tuple(f"alpha{i}" for i in range(3)) + tuple(f"w{i}" for i in range(3))


def pluecker_labels() -> tuple:
    return tuple(f"p{i}{j}" for i, j in subsets(5, 2))


def segre_quadrics(field: FieldSpec = QQ) -> QuadricSystem:
    """The 2 x 2 minors ``alpha_i w_j - alpha_j w_i`` (``i < j``) of the 3 x 2 matrix ``[alpha | w]``."""
    mats = [quadric_from_monomials(field, 6, [(1, i, 3 + j), (-1, j, 3 + i)]) for i, j in subsets(3, 2)]
    return QuadricSystem(from_basis(field, 6, 6, mats).with_metadata(family="segre"), segre_labels())


def pluecker_quadrics(field: FieldSpec = QQ) -> QuadricSystem:
    """Components of ``alpha ^ alpha`` in ``Lambda^4 F^5``, one per omitted index ``u``.

    The component omitting ``u`` is ``sum sign(i,j,k,l) p_ij p_kl`` over the
    three splittings of the remaining four indices into pairs ``{i<j}, {k<l}``
    with ``i`` the smallest.
    """
    pairs = subsets(5, 2)
    index = {P: a for a, P in enumerate(pairs)}
    mats = []
    for u in range(5):
        rest = [x for x in range(5) if x != u]
        i = rest[0]
        terms = []
        for j in rest[1:]:
            k, l = [x for x in rest if x not in (i, j)]
            terms.append((permutation_sign((i, j, k, l)), index[(i, j)], index[(k, l)]))
        mats.append(quadric_from_monomials(field, 10, terms))
    return QuadricSystem(from_basis(field, 10, 10, mats).with_metadata(family="pluecker"), pluecker_labels())


# -- vanishing on parametrized points -------------------------------------------------

def _segre_point(F: FieldSpec, rng: random.Random) -> list:
    a = [F.random_element(rng, SAMPLE_HEIGHT) for _ in range(3)]
    lam, mu = F.random_element(rng, SAMPLE_HEIGHT), F.random_element(rng, SAMPLE_HEIGHT)
    return [F.norm(lam * x) for x in a] + [F.norm(mu * x) for x in a]


def _decomposable_point(F: FieldSpec, rng: random.Random) -> list:
    v = [F.random_element(rng, SAMPLE_HEIGHT) for _ in range(5)]
    w = [F.random_element(rng, SAMPLE_HEIGHT) for _ in range(5)]
    return [F.norm(v[i] * w[j] - v[j] * w[i]) for i, j in subsets(5, 2)]


def parametrized_point(family: str, field: FieldSpec, rng: random.Random) -> list:
    if family == SEGRE_POINTS:
        return _segre_point(field, rng)
    if family == DECOMPOSABLE:
        return _decomposable_point(field, rng)
    raise ValueError(f"unknown family {family!r}; expected one of {FAMILIES}")


def vanishes_on_parametrized(Q: QuadricSystem, family: str, samples: int = 200, seed: int = 0,
                             workers: int | None = 1) -> bool:
    """True iff every quadric is exactly 0 at ``samples`` seeded random points of ``family``."""
    need = {SEGRE_POINTS: 6, DECOMPOSABLE: 10}.get(family)
    if need is None:
        raise ValueError(f"unknown family {family!r}; expected one of {FAMILIES}")
    if Q.nvars != need:
        raise ValueError(f"{family} lives in {need} coordinates, the system has {Q.nvars}")
    F = Q.space.field

    def run(i):
        rng = random.Random(subseed(seed, f"{family}:{i}"))
        return all(v == 0 for v in Q.evaluate(parametrized_point(family, F, rng)))

    return all(parallel_map(run, range(samples), workers))


def _flat(Q: QuadricSystem) -> list[list]:
    n = Q.nvars
    return [[M.entries[i][j] for i in range(n) for j in range(i, n)] for M in Q.space.basis]


def span_equal(Q1: QuadricSystem, Q2: QuadricSystem) -> bool:
    """Exact equality of the linear spans of the two systems."""
    if Q1.nvars != Q2.nvars:
        raise ValueError(f"coordinate counts differ: {Q1.nvars} vs {Q2.nvars}")
    F = Q1.space.field
    if Q2.space.field != F:
        raise ValueError("systems live over different fields")
    a, b = _flat(Q1), _flat(Q2)
    ra, rb = rank_of(F, a), rank_of(F, b)
    return ra == rb and rank_of(F, a + b) == ra
