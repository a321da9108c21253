"""Dense exact matrices over Q and F_p, with rank, kernel and determinant.

Over Q, rank and determinant run fraction-free Bareiss elimination on an
integer copy (each row scaled by the lcm of its denominators); kernels use
Gauss-Jordan on :class:`~fractions.Fraction`.  Over F_p the rank goes
through :mod:`crank.kernels`.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from math import lcm
from typing import Iterable, Sequence

from crank import kernels
from crank.field import FieldSpec


@dataclass(frozen=True)
class DenseMatrix:
    field: FieldSpec
    rows: int
    cols: int
    entries: tuple  # tuple of row tuples

    def __post_init__(self):
        if len(self.entries) != self.rows or any(len(r) != self.cols for r in self.entries):
            raise ValueError("entry grid does not match the declared shape")

    @classmethod
    def from_rows(cls, field: FieldSpec, rows: Sequence[Sequence], cols: int | None = None) -> "DenseMatrix":
        grid = tuple(tuple(field(x) for x in row) for row in rows)
        ncols = len(grid[0]) if grid else (cols or 0)
        return cls(field, len(grid), ncols, grid)

    @classmethod
    def zeros(cls, field: FieldSpec, rows: int, cols: int) -> "DenseMatrix":
        z = field.zero
        return cls(field, rows, cols, tuple((z,) * cols for _ in range(rows)))

    @classmethod
    def identity(cls, field: FieldSpec, n: int) -> "DenseMatrix":
        return cls.from_rows(field, [[1 if i == j else 0 for j in range(n)] for i in range(n)])

    @classmethod
    def diag(cls, field: FieldSpec, values: Sequence) -> "DenseMatrix":
        n = len(values)
        return cls.from_rows(field, [[values[i] if i == j else 0 for j in range(n)] for i in range(n)])

    @classmethod
    def unit(cls, field: FieldSpec, rows: int, cols: int, i: int, j: int) -> "DenseMatrix":
        return cls.from_rows(field, [[1 if (a, b) == (i, j) else 0 for b in range(cols)] for a in range(rows)])

    @property
    def shape(self) -> tuple[int, int]:
        return self.rows, self.cols

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    @property
    def T(self) -> "DenseMatrix":
        return DenseMatrix(self.field, self.cols, self.rows, tuple(zip(*self.entries)) if self.rows else
                           tuple(() for _ in range(self.cols)))

    def _check(self, other: "DenseMatrix"):
        if other.field != self.field:
            raise ValueError(f"field mismatch: {self.field} vs {other.field}")

    def __add__(self, other: "DenseMatrix") -> "DenseMatrix":
        self._check(other)
        if other.shape != self.shape:
            raise ValueError("shape mismatch")
        F = self.field
        return DenseMatrix(F, self.rows, self.cols, tuple(
            tuple(F.norm(a + b) for a, b in zip(r, s)) for r, s in zip(self.entries, other.entries)))

    def __neg__(self) -> "DenseMatrix":
        return self.scale(-1)

    def __sub__(self, other: "DenseMatrix") -> "DenseMatrix":
        return self + (-other)

    def scale(self, c) -> "DenseMatrix":
        F = self.field
        c = F(c)
        return DenseMatrix(F, self.rows, self.cols, tuple(tuple(F.norm(c * a) for a in r) for r in self.entries))

    def __matmul__(self, other: "DenseMatrix") -> "DenseMatrix":
        self._check(other)
        if self.cols != other.rows:
            raise ValueError("inner dimensions differ")
        F = self.field
        cols = list(zip(*other.entries))
        return DenseMatrix(F, self.rows, other.cols, tuple(
            tuple(F.norm(sum(a * b for a, b in zip(r, c))) for c in cols) for r in self.entries))

    def apply(self, v: Sequence) -> tuple:
        F = self.field
        return tuple(F.norm(sum(a * F(b) for a, b in zip(r, v))) for r in self.entries)

    def flatten(self) -> tuple:
        return tuple(x for r in self.entries for x in r)

    def is_zero(self) -> bool:
        return not any(any(r) for r in self.entries)

    def is_symmetric(self) -> bool:
        return self.rows == self.cols and self == self.T

    def is_skew(self) -> bool:
        return (self.rows == self.cols and self.T == -self
                and all(not self.entries[i][i] for i in range(self.rows)))

    def reduce_mod(self, p: int) -> list:
        """Integer grid reduced mod ``p`` (rationals need denominators prime to p)."""
        if self.field.is_finite:
            if self.field.p != p:
                raise ValueError(f"cannot reduce an {self.field} matrix mod {p}")
            return [list(r) for r in self.entries]
        out = []
        for r in self.entries:
            out.append([x.numerator * pow(x.denominator, -1, p) % p for x in r])
        return out

    def to_json(self) -> list:
        fmt = self.field.format_scalar
        return [[fmt(x) for x in r] for r in self.entries]

    @classmethod
    def from_json(cls, field: FieldSpec, data: list) -> "DenseMatrix":
        return cls.from_rows(field, data)

    def __str__(self) -> str:
        fmt = (lambda x: str(x)) if self.field.is_rational else (lambda x: str(int(x)))
        cells = [[fmt(x) for x in r] for r in self.entries]
        w = max((len(c) for r in cells for c in r), default=1)
        return "\n".join("[" + " ".join(c.rjust(w) for c in r) + "]" for r in cells)


# -- integer / rational elimination helpers ----------------------------------

def integer_rows(rows: Iterable[Sequence[Fraction]]) -> list[list[int]]:
    """Scale each rational row by the lcm of its denominators."""
    out = []
    for row in rows:
        L = lcm(*(Fraction(x).denominator for x in row)) if row else 1
        out.append([int(Fraction(x) * L) for x in row])
    return out


def bareiss_rank(a: list[list[int]]) -> int:
    """Fraction-free elimination rank of an integer matrix (mutates ``a``)."""
    m = len(a)
    n = len(a[0]) if m else 0
    prev, r = 1, 0
    for c in range(n):
        if r == m:
            break
        piv = next((i for i in range(r, m) if a[i][c]), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        pr = a[r][c]
        prow = a[r]
        for i in range(r + 1, m):
            row = a[i]
            f = row[c]
            if f:
                for j in range(c + 1, n):
                    row[j] = (pr * row[j] - f * prow[j]) // prev
            else:
                for j in range(c + 1, n):
                    row[j] = (pr * row[j]) // prev
            row[c] = 0
        prev = pr
        r += 1
    return r


def bareiss_det(a: list[list[int]]) -> int:
    """Determinant of a square integer matrix (mutates ``a``)."""
    n = len(a)
    if n == 0:
        return 1
    sign, prev = 1, 1
    for k in range(n - 1):
        if a[k][k] == 0:
            piv = next((i for i in range(k + 1, n) if a[i][k]), None)
            if piv is None:
                return 0
            a[k], a[piv] = a[piv], a[k]
            sign = -sign
        pk = a[k][k]
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (pk * a[i][j] - a[i][k] * a[k][j]) // prev
        prev = pk
    return sign * a[n - 1][n - 1]


def rank_of(field: FieldSpec, rows: Sequence[Sequence]) -> int:
    """Exact rank of a list of rows with entries in ``field``."""
    rows = [list(r) for r in rows]
    if not rows or not rows[0]:
        return 0
    if field.is_finite:
        return kernels.rank_mod(rows, field.p)
    return bareiss_rank(integer_rows(rows))


def rref(field: FieldSpec, rows: Sequence[Sequence]) -> tuple[list[list], list[int]]:
    """Reduced row echelon form (nonzero rows only) and pivot columns."""
    F = field
    a = [[F(x) for x in r] for r in rows]
    m = len(a)
    n = len(a[0]) if m else 0
    pivots, r = [], 0
    for c in range(n):
        if r == m:
            break
        piv = next((i for i in range(r, m) if a[i][c]), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        inv = F.inv(a[r][c])
        a[r] = [F.norm(x * inv) for x in a[r]]
        for i in range(m):
            if i != r and a[i][c]:
                f = a[i][c]
                a[i] = [F.norm(x - f * y) for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
    return a[:r], pivots


# -- public operations --------------------------------------------------------

def mat_rank(M: DenseMatrix) -> int:
    return rank_of(M.field, M.entries)


def mat_kernel(M: DenseMatrix) -> list[tuple]:
    """Basis of the right kernel ``{v : Mv = 0}``, one vector per free column."""
    F = M.field
    R, pivots = rref(F, M.entries)
    free = [c for c in range(M.cols) if c not in pivots]
    basis = []
    for fc in free:
        v = [F.zero] * M.cols
        v[fc] = F.one
        for row, pc in zip(R, pivots):
            v[pc] = F.norm(-row[fc])
        basis.append(tuple(v))
    return basis


def mat_det(M: DenseMatrix):
    if M.rows != M.cols:
        raise ValueError(f"determinant of a non-square {M.rows}x{M.cols} matrix")
    F = M.field
    if F.is_rational:
        scales = [lcm(*(x.denominator for x in r)) if r else 1 for r in M.entries]
        d = bareiss_det(integer_rows(M.entries))
        denom = 1
        for s in scales:
            denom *= s
        return Fraction(d, denom)
    p = F.p
    a = [list(r) for r in M.entries]
    n = M.rows
    det = 1
    for c in range(n):
        piv = next((i for i in range(c, n) if a[i][c]), None)
        if piv is None:
            return 0
        if piv != c:
            a[c], a[piv] = a[piv], a[c]
            det = -det
        det = det * a[c][c] % p
        inv = pow(a[c][c], -1, p)
        for i in range(c + 1, n):
            f = a[i][c] * inv % p
            if f:
                a[i] = [(x - f * y) % p for x, y in zip(a[i], a[c])]
    return det % p


DEFAULT_HEIGHT = 100


def random_matrix(field: FieldSpec, rows: int, cols: int, seed, height: int = DEFAULT_HEIGHT) -> DenseMatrix:
    """Seeded random matrix; over Q the entries are integers in ``[-height, height]``."""
    rng = seed if isinstance(seed, random.Random) else random.Random(seed)
    return DenseMatrix.from_rows(
        field, [[field.random_element(rng, height) for _ in range(cols)] for _ in range(rows)], cols)
