"""Sparse multivariate polynomials and matrices of polynomials.

A matrix space ``A = span(B_0, ..., B_l)`` becomes the polynomial matrix
``sum x_i B_i``; restricting it to a line ``x = s*p + t*q`` yields a
:class:`BinaryFormMatrix`, whose multiplication maps on binary forms carry
all the splitting-type information used in :mod:`crank.bundles`.

Minors are enumerated in a fixed order: row subsets lexicographically, and
for each row subset the column subsets lexicographically.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Sequence

from crank.field import FieldSpec
from crank.linalg import DenseMatrix, rank_of


class MultiPoly:
    """Polynomial in ``nvars`` variables; ``terms`` maps exponent tuples to nonzero coefficients."""

    __slots__ = ("field", "nvars", "terms")

    def __init__(self, field: FieldSpec, nvars: int, terms: dict | None = None, _clean: bool = False):
        self.field = field
        self.nvars = nvars
        if terms is None:
            terms = {}
        elif not _clean:
            cleaned = {}
            for e, c in terms.items():
                e = tuple(e)
                if len(e) != nvars:
                    raise ValueError(f"exponent {e} has wrong length for {nvars} variables")
                c = field(c)
                if c:
                    cleaned[e] = field.norm(cleaned.get(e, field.zero) + c)
                    if not cleaned[e]:
                        del cleaned[e]
            terms = cleaned
        self.terms = terms

    # -- constructors ---------------------------------------------------------

    @classmethod
    def constant(cls, field: FieldSpec, nvars: int, c) -> "MultiPoly":
        return cls(field, nvars, {(0,) * nvars: c})

    @classmethod
    def variable(cls, field: FieldSpec, nvars: int, i: int) -> "MultiPoly":
        e = [0] * nvars
        e[i] = 1
        return cls(field, nvars, {tuple(e): 1})

    @classmethod
    def linear(cls, field: FieldSpec, coeffs: Sequence) -> "MultiPoly":
        n = len(coeffs)
        return cls(field, n, {tuple(int(i == j) for j in range(n)): c for i, c in enumerate(coeffs)})

    @classmethod
    def univariate(cls, field: FieldSpec, coeffs: Sequence) -> "MultiPoly":
        """From a dense coefficient list, lowest degree first."""
        return cls(field, 1, {(i,): c for i, c in enumerate(coeffs)})

    def zero_like(self) -> "MultiPoly":
        return MultiPoly(self.field, self.nvars, {}, _clean=True)

    # -- predicates -----------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def degree(self) -> int:
        """Total degree; ``-1`` for the zero polynomial."""
        return max((sum(e) for e in self.terms), default=-1)

    def is_homogeneous(self, d: int | None = None) -> bool:
        degs = {sum(e) for e in self.terms}
        return len(degs) <= 1 and (d is None or not degs or degs == {d})

    def coeff(self, exponent: Sequence[int]):
        return self.terms.get(tuple(exponent), self.field.zero)

    def __eq__(self, other) -> bool:
        if isinstance(other, MultiPoly):
            return (self.field, self.nvars, self.terms) == (other.field, other.nvars, other.terms)
        if isinstance(other, (int,)) and other == 0:
            return not self.terms
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.field, self.nvars, frozenset(self.terms.items())))

    # -- arithmetic -----------------------------------------------------------

    def _same(self, other: "MultiPoly"):
        if other.field != self.field or other.nvars != self.nvars:
            raise ValueError("polynomials live in different rings")

    def __add__(self, other: "MultiPoly") -> "MultiPoly":
        self._same(other)
        F = self.field
        out = dict(self.terms)
        for e, c in other.terms.items():
            v = F.norm(out.get(e, F.zero) + c)
            if v:
                out[e] = v
            else:
                out.pop(e, None)
        return MultiPoly(F, self.nvars, out, _clean=True)

    def __neg__(self) -> "MultiPoly":
        F = self.field
        return MultiPoly(F, self.nvars, {e: F.norm(-c) for e, c in self.terms.items()}, _clean=True)

    def __sub__(self, other: "MultiPoly") -> "MultiPoly":
        return self + (-other)

    def scale(self, c) -> "MultiPoly":
        F = self.field
        c = F(c)
        if not c:
            return self.zero_like()
        return MultiPoly(F, self.nvars, {e: F.norm(c * v) for e, v in self.terms.items()}, _clean=True)

    def __mul__(self, other: "MultiPoly") -> "MultiPoly":
        self._same(other)
        F = self.field
        out: dict = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = out.get(e, 0) + c1 * c2
        return MultiPoly(F, self.nvars, {e: F.norm(c) for e, c in out.items() if F.norm(c)}, _clean=True)

    def __pow__(self, k: int) -> "MultiPoly":
        out = MultiPoly.constant(self.field, self.nvars, 1)
        for _ in range(k):
            out = out * self
        return out

    def leading(self) -> tuple:
        """Lex-largest term ``(exponent, coeff)``."""
        e = max(self.terms)
        return e, self.terms[e]

    def divexact(self, other: "MultiPoly") -> "MultiPoly":
        """Quotient when ``other`` divides ``self`` exactly (lex leading-term division)."""
        self._same(other)
        if other.is_zero():
            raise ZeroDivisionError("division by the zero polynomial")
        F = self.field
        rem = self
        q: dict = {}
        le, lc = other.leading()
        inv = F.inv(lc)
        while rem.terms:
            e, c = rem.leading()
            diff = tuple(a - b for a, b in zip(e, le))
            if min(diff) < 0:
                raise ArithmeticError("division is not exact")
            qc = F.norm(c * inv)
            q[diff] = qc
            rem = rem - MultiPoly(F, self.nvars, {diff: qc}, _clean=True) * other
        return MultiPoly(F, self.nvars, q, _clean=True)

    def evaluate(self, point: Sequence):
        F = self.field
        pt = [F(x) for x in point]
        if len(pt) != self.nvars:
            raise ValueError(f"point has {len(pt)} coordinates, ring has {self.nvars} variables")
        total = F.zero
        for e, c in self.terms.items():
            v = c
            for x, k in zip(pt, e):
                if k:
                    v = v * x ** k
            total = F.norm(total + v)
        return total

    def substitute(self, images: Sequence["MultiPoly"]) -> "MultiPoly":
        """Compose: replace variable ``i`` by ``images[i]``."""
        if len(images) != self.nvars:
            raise ValueError("one image per variable is required")
        target = images[0] if images else None
        out = MultiPoly(self.field, target.nvars if target else 0)
        for e, c in self.terms.items():
            term = MultiPoly.constant(self.field, out.nvars, c)
            for img, k in zip(images, e):
                if k:
                    term = term * img ** k
            out = out + term
        return out

    # -- univariate helpers ---------------------------------------------------

    def dense(self) -> list:
        """Coefficient list of a univariate polynomial, lowest degree first."""
        if self.nvars != 1:
            raise ValueError("dense form needs a univariate polynomial")
        d = self.degree()
        out = [self.field.zero] * (d + 1)
        for (k,), c in self.terms.items():
            out[k] = c
        return out

    # -- serialization --------------------------------------------------------

    def to_json(self) -> list:
        fmt = self.field.format_scalar
        return [{"exponents": list(e), "coeff": fmt(c)} for e, c in sorted(self.terms.items())]

    @classmethod
    def from_json(cls, field: FieldSpec, nvars: int, data: list) -> "MultiPoly":
        return cls(field, nvars, {tuple(t["exponents"]): field.parse_scalar(t["coeff"]) for t in data})

    def __repr__(self) -> str:
        if not self.terms:
            return "0"
        names = ["s", "t"] if self.nvars == 2 else [f"x{i}" for i in range(self.nvars)]
        parts = []
        for e, c in sorted(self.terms.items(), reverse=True):
            mono = "*".join(n if k == 1 else f"{n}^{k}" for n, k in zip(names, e) if k)
            cs = self.field.format_scalar(c).replace(f" mod {self.field.p}", "") if self.field.p else str(c)
            parts.append(mono if mono and cs == "1" else f"{cs}*{mono}" if mono else cs)
        return " + ".join(parts)


def poly_det(entries: Sequence[Sequence[MultiPoly]]) -> MultiPoly:
    """Division-free determinant by Laplace expansion memoized on column subsets."""
    n = len(entries)
    if n == 0:
        raise ValueError("empty determinant")
    zero = entries[0][0].zero_like()
    one = MultiPoly.constant(zero.field, zero.nvars, 1)
    memo: dict[int, MultiPoly] = {0: one}
    full = (1 << n) - 1

    # memo[mask] = determinant of the last popcount(mask) rows on columns ``mask``
    def solve(mask: int) -> MultiPoly:
        if mask in memo:
            return memo[mask]
        k = bin(mask).count("1")
        row = entries[n - k]
        total = zero
        sign = 1
        for j in range(n):
            if mask >> j & 1:
                a = row[j]
                if a:
                    sub = solve(mask & ~(1 << j))
                    if sub:
                        term = a * sub
                        total = total + term if sign > 0 else total - term
                sign = -sign
        memo[mask] = total
        return total

    return solve(full)


@dataclass(frozen=True)
class PolyMatrix:
    field: FieldSpec
    nvars: int
    entries: tuple  # tuple of row tuples of MultiPoly

    def __post_init__(self):
        for row in self.entries:
            for e in row:
                if e.field != self.field or e.nvars != self.nvars:
                    raise ValueError("entries must share the field and variable count")
        if len({len(r) for r in self.entries}) > 1:
            raise ValueError("ragged polynomial matrix")

    @property
    def rows(self) -> int:
        return len(self.entries)

    @property
    def cols(self) -> int:
        return len(self.entries[0]) if self.entries else 0

    @classmethod
    def from_linear(cls, basis: Sequence[DenseMatrix]) -> "PolyMatrix":
        """``sum_i x_i * basis[i]``."""
        F = basis[0].field
        k = len(basis)
        R, C = basis[0].shape
        rows = []
        for i in range(R):
            rows.append(tuple(MultiPoly.linear(F, [B.entries[i][j] for B in basis]) for j in range(C)))
        return cls(F, k, tuple(rows))

    def linear_coefficients(self) -> list[DenseMatrix]:
        """Inverse of :meth:`from_linear` for matrices of linear forms."""
        out = []
        for v in range(self.nvars):
            e = tuple(int(i == v) for i in range(self.nvars))
            out.append(DenseMatrix(self.field, self.rows, self.cols,
                                   tuple(tuple(p.coeff(e) for p in r) for r in self.entries)))
        for r in self.entries:
            for p in r:
                if not p.is_homogeneous(1) and p:
                    raise ValueError("matrix entries are not linear forms")
        return out

    def transpose(self) -> "PolyMatrix":
        return type(self)(self.field, self.nvars, tuple(zip(*self.entries)))

    def to_json(self) -> list:
        return [[p.to_json() for p in r] for r in self.entries]


@dataclass(frozen=True)
class BinaryFormMatrix(PolyMatrix):
    """Matrix of linear binary forms ``s*X + t*Y`` (a pencil on P^1)."""

    def __post_init__(self):
        super().__post_init__()
        if self.nvars != 2:
            raise ValueError("binary forms have exactly two variables")
        for r in self.entries:
            for p in r:
                if p and not p.is_homogeneous(1):
                    raise ValueError(f"entry {p!r} is not a linear binary form")

    @classmethod
    def from_pencil(cls, X: DenseMatrix, Y: DenseMatrix) -> "BinaryFormMatrix":
        pm = PolyMatrix.from_linear([X, Y])
        return cls(pm.field, 2, pm.entries)

    @property
    def s_part(self) -> DenseMatrix:
        return self.linear_coefficients()[0]

    @property
    def t_part(self) -> DenseMatrix:
        return self.linear_coefficients()[1]


def evaluate(P: PolyMatrix, point: Sequence) -> DenseMatrix:
    F = P.field
    if len(point) != P.nvars:
        raise ValueError(f"point has {len(point)} coordinates, expected {P.nvars}")
    pt = [F(x) for x in point]
    return DenseMatrix(F, P.rows, P.cols, tuple(tuple(e.evaluate(pt) for e in r) for r in P.entries))


def restrict_to_line(P: PolyMatrix, p: Sequence, q: Sequence) -> BinaryFormMatrix:
    """Substitute ``x = s*p + t*q``."""
    F = P.field
    p = [F(x) for x in p]
    q = [F(x) for x in q]
    if len(p) != P.nvars or len(q) != P.nvars:
        raise ValueError("line points must have one coordinate per variable")
    if rank_of(F, [p, q]) < 2:
        raise ValueError("points spanning the line are linearly dependent")
    images = [MultiPoly.linear(F, [a, b]) for a, b in zip(p, q)]
    return BinaryFormMatrix(F, 2, tuple(tuple(e.substitute(images) for e in r) for r in P.entries))


def minor_index(rows: int, cols: int, t: int) -> list[tuple[tuple, tuple]]:
    return [(R, C) for R in combinations(range(rows), t) for C in combinations(range(cols), t)]


def minors(P: PolyMatrix, t: int) -> list[MultiPoly]:
    if not 1 <= t <= min(P.rows, P.cols):
        raise ValueError(f"minor size {t} outside 1..{min(P.rows, P.cols)}")
    return [poly_det([[P.entries[i][j] for j in C] for i in R]) for R, C in minor_index(P.rows, P.cols, t)]


def _trim(c: list) -> list:
    while c and not c[-1]:
        c.pop()
    return c


def _poly_mod(a: list, b: list, F: FieldSpec) -> list:
    a = list(a)
    inv = F.inv(b[-1])
    while len(a) >= len(b):
        f = F.norm(a[-1] * inv)
        shift = len(a) - len(b)
        for i, c in enumerate(b):
            a[shift + i] = F.norm(a[shift + i] - f * c)
        _trim(a)
        if not a:
            break
    return a


def gcd_univariate(polys: Iterable[MultiPoly], field: FieldSpec | None = None) -> MultiPoly:
    """Monic gcd of univariate polynomials; the gcd of an empty or all-zero list is 0.

    An empty list needs ``field`` to know where its zero lives.
    """
    F = field
    g: list = []
    seen = False
    for p in polys:
        seen = True
        if p.nvars != 1:
            raise ValueError("gcd_univariate takes univariate polynomials only")
        F = p.field
        b = _trim(p.dense()) if p else []
        if not b:
            continue
        a = g
        while b:
            a, b = b, _poly_mod(a, b, F)
        g = a
        if len(g) == 1:
            break
    if not seen and F is None:
        raise ValueError("gcd of an empty list needs a field")
    if g:
        inv = F.inv(g[-1])
        g = [F.norm(c * inv) for c in g]
    return MultiPoly.univariate(F, g)


def multiplication_matrix(B: BinaryFormMatrix, d: int) -> DenseMatrix:
    """Matrix of ``v(s,t) -> B*v`` from degree-``d`` to degree-``d+1`` vectors of forms.

    Monomials are ordered ``s^d, s^(d-1) t, ..., t^d``; coordinates are
    monomial-major (block ``a`` holds the ``s^(d-a) t^a`` coefficients of all
    components).  Shape is ``rows*(d+2) x cols*(d+1)``.
    """
    if d < 0:
        raise ValueError("degree must be non-negative")
    X, Y = B.s_part, B.t_part
    return multiplication_matrix_pencil(X, Y, d)


def multiplication_matrix_pencil(X: DenseMatrix, Y: DenseMatrix, d: int) -> DenseMatrix:
    F = X.field
    R, C = X.shape
    grid = [[F.zero] * (C * (d + 1)) for _ in range(R * (d + 2))]
    for a in range(d + 1):
        for i in range(R):
            for j in range(C):
                grid[a * R + i][a * C + j] = X.entries[i][j]
                grid[(a + 1) * R + i][a * C + j] = Y.entries[i][j]
    return DenseMatrix(F, R * (d + 2), C * (d + 1), tuple(tuple(r) for r in grid))


def symbolic_rank(P: PolyMatrix) -> int:
    """Rank over the rational function field, by fraction-free elimination.

    Bareiss updates divide exactly by the previous pivot, so all
    intermediate entries stay polynomials (they are minors of ``P``).
    """
    a = [list(r) for r in P.entries]
    m, n = P.rows, P.cols
    if m == 0 or n == 0:
        return 0
    one = MultiPoly.constant(P.field, P.nvars, 1)
    prev = one
    r = 0
    for c in range(n):
        if r == m:
            break
        piv = next((i for i in range(r, m) if a[i][c]), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        pr = a[r][c]
        for i in range(r + 1, m):
            f = a[i][c]
            for j in range(c + 1, n):
                num = pr * a[i][j]
                if f and a[r][j]:
                    num = num - f * a[r][j]
                a[i][j] = num.divexact(prev) if num else num
            a[i][c] = pr.zero_like()
        prev = pr
        r += 1
    return r
