"""Closed-form invariants: Chern-class arithmetic, dimension bounds, Betti numbers.

Chern classes live on projective space, so a total Chern class is a
truncated polynomial ``1 + c_1 h + ... + c_l h^l`` in the hyperplane class.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb, factorial, prod
from typing import Sequence

from crank.field import QQ
from crank.linalg import DenseMatrix, mat_det, rank_of


class OddRankError(ValueError):
    """Self-duality forces ``c_1(E) = r/2``, so an odd rank is impossible."""


class NonIntegralChern(ValueError):
    """A Chern coefficient forced by the relations is not an integer."""

    def __init__(self, r: int, failures: list[tuple[str, Fraction]]):
        self.r = r
        self.failures = failures
        self.term, self.value = failures[0]
        listing = ", ".join(f"{name} = {val}" for name, val in failures)
        super().__init__(f"r={r}: non-integral Chern coefficient(s): {listing}")


# -- Chern vectors -------------------------------------------------------------

def _fmt_coeff(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"({c.numerator}/{c.denominator})"


@dataclass(frozen=True)
class ChernVector:
    coeffs: tuple  # c_0 = 1, c_1, ..., c_l as Fractions

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(Fraction(c) for c in self.coeffs))
        if not self.coeffs or self.coeffs[0] != 1:
            raise ValueError("a total Chern class starts with c_0 = 1")

    @classmethod
    def of(cls, *coeffs) -> "ChernVector":
        return cls(tuple(coeffs))

    @classmethod
    def one(cls, degree: int) -> "ChernVector":
        return cls((1,) + (0,) * degree)

    @classmethod
    def from_splitting(cls, degrees: Sequence[int], degree: int) -> "ChernVector":
        """Chern class of a sum of line bundles ``O(d)``, truncated at ``degree``."""
        out = cls.one(degree)
        for d in degrees:
            out = chern_product(out, cls((1, d) + (0,) * (degree - 1)) if degree else cls((1,)))
        return out

    @classmethod
    def twisted_trivial(cls, n: int, degree: int) -> "ChernVector":
        """``(1+h)^n`` truncated at ``degree``."""
        return cls(tuple(comb(n, i) for i in range(degree + 1)))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __getitem__(self, i: int) -> Fraction:
        return self.coeffs[i] if i < len(self.coeffs) else Fraction(0)

    def pad(self, degree: int) -> "ChernVector":
        if degree < self.degree:
            return ChernVector(self.coeffs[:degree + 1])
        return ChernVector(self.coeffs + (Fraction(0),) * (degree - self.degree))

    def inverse(self) -> "ChernVector":
        out = [Fraction(1)]
        for i in range(1, self.degree + 1):
            out.append(-sum(self.coeffs[j] * out[i - j] for j in range(1, i + 1)))
        return ChernVector(tuple(out))

    def is_integral(self) -> bool:
        return all(c.denominator == 1 for c in self.coeffs)

    def to_json(self) -> list[str]:
        return [str(c) for c in self.coeffs]

    def __str__(self) -> str:
        parts = ["1"]
        for i, c in enumerate(self.coeffs[1:], start=1):
            if not c:
                continue
            mono = "h" if i == 1 else f"h^{i}"
            mag = abs(c)
            body = mono if mag == 1 else f"{_fmt_coeff(mag)}{mono}"
            parts.append(("- " if c < 0 else "+ ") + body)
        return " ".join(parts)


def chern_product(a: ChernVector, b: ChernVector) -> ChernVector:
    if a.degree != b.degree:
        raise ValueError(f"truncation degrees differ: {a.degree} vs {b.degree}")
    l = a.degree
    return ChernVector(tuple(sum(a.coeffs[j] * b.coeffs[i - j] for j in range(i + 1)) for i in range(l + 1)))


def cokernel_chern(image: ChernVector, n: int) -> ChernVector:
    """``c(N)`` from ``0 -> E -> O(1)^n -> N -> 0``."""
    return chern_product(ChernVector.twisted_trivial(n, image.degree), image.inverse())


# -- self-duality relations ------------------------------------------------------------

@dataclass(frozen=True)
class LinearRelation:
    """``sum_j coeffs[j-1] * e_j = rhs`` over ``e_1, ..., e_l``."""

    coeffs: tuple
    rhs: Fraction

    def holds(self, e: Sequence) -> bool:
        return sum(Fraction(c) * Fraction(x) for c, x in zip(self.coeffs, e)) == self.rhs

    def is_trivial(self) -> bool:
        return not any(self.coeffs) and self.rhs == 0

    def substitute_e1(self, e1: Fraction) -> "LinearRelation":
        return LinearRelation((Fraction(0),) + tuple(self.coeffs[1:]), self.rhs - self.coeffs[0] * e1)

    def scaled(self, c) -> "LinearRelation":
        c = Fraction(c)
        return LinearRelation(tuple(c * x for x in self.coeffs), c * self.rhs)

    def __str__(self) -> str:
        terms = []
        for j, c in enumerate(self.coeffs, start=1):
            if c:
                mag = abs(c)
                body = f"e{j}" if mag == 1 else f"{_fmt_coeff(mag)}e{j}"
                terms.append(("-" if c < 0 else "+", body))
        if not terms:
            lhs = "0"
        else:
            lhs = ("-" if terms[0][0] == "-" else "") + terms[0][1]
            lhs += "".join(f" {s} {b}" for s, b in terms[1:])
        return f"{lhs} = {self.rhs}"


def selfdual_relation(r: int, i: int, l: int) -> LinearRelation:
    """``e_i = sum_{j<=i} C(r-j, i-j) (-1)^j e_j`` moved to the form ``sum a_j e_j = b``."""
    if not 1 <= i <= l:
        raise ValueError(f"index {i} outside 1..{l}")
    coeffs = [Fraction(0)] * l
    coeffs[i - 1] += 1
    for j in range(1, i + 1):
        coeffs[j - 1] -= _gen_binom(r - j, i - j) * (-1) ** j
    return LinearRelation(tuple(coeffs), Fraction(_binom(r, i)))


def selfdual_relations(r: int, l: int) -> list[LinearRelation]:
    """One relation for each odd ``i <= l``, solving for ``e_i`` in terms of lower ``e_j``.

    The ``i = 1`` relation is halved to read ``e1 = r/2``; the others are
    reported after substituting ``e_1 = r/2`` and negating, so ``i = 3``
    reads ``(r-2)e2 - 2e3 = r(r-1)(r-2)/12``.
    """
    if r % 2:
        raise OddRankError(f"rank {r} is odd: the first relation forces e1 = r/2 = {Fraction(r, 2)}")
    if r < 2 or l < 1:
        raise ValueError("need r >= 2 and l >= 1")
    e1 = Fraction(r, 2)
    out = []
    for i in range(1, l + 1, 2):
        rel = selfdual_relation(r, i, l)
        out.append(rel.scaled(Fraction(1, 2)) if i == 1 else rel.substitute_e1(e1).scaled(-1))
    return out


def independent_relation_count(r: int, l: int) -> int:
    """Rank of the full affine system (all ``1 <= i <= l``) of self-duality relations."""
    rows = [list(rel.coeffs) + [rel.rhs] for rel in (selfdual_relation(r, i, l) for i in range(1, l + 1))]
    return rank_of(QQ, rows)


# -- the l = 3, m - r = 2 boundary case ------------------------------------------------

def chern_boundary_l3(r: int) -> tuple[ChernVector, ChernVector]:
    """Chern classes ``(c(K), c(E))`` forced when ``l = 3`` and ``m - r = 2``.

    Solves ``e_1 = r/2``, the cubic self-duality relation and
    ``c_3(K) = -e_3 + 2 e_1 e_2 - e_1^3 = 0`` for ``(e_2, e_3)``; ``K`` has
    rank 2 so ``c(K)`` stops at ``h^2``.  Raises :class:`NonIntegralChern`
    naming the first non-integral coefficient.
    """
    if r % 2:
        raise OddRankError(f"rank {r} is odd")
    if r < 4:
        raise ValueError("the boundary case needs r >= 4")
    e1 = Fraction(r, 2)
    cubic = selfdual_relation(r, 3, 3).substitute_e1(e1)  # a2*e2 + a3*e3 = b
    a2, a3, b = cubic.coeffs[1], cubic.coeffs[2], cubic.rhs
    # c_3(K) = 0 gives e3 = 2 e1 e2 - e1^3
    e2 = (b + a3 * e1**3) / (a2 + 2 * a3 * e1)
    e3 = 2 * e1 * e2 - e1**3
    cE = ChernVector.of(1, e1, e2, e3)
    cK_full = cE.inverse()
    if cK_full[3] != 0:
        raise AssertionError("solved classes do not kill c_3(K)")
    cK = cK_full.pad(2)
    failures = [(f"c{i}(K)", c) for i, c in enumerate(cK.coeffs) if c.denominator != 1]
    failures += [(f"c{i}(E)", c) for i, c in enumerate(cE.coeffs) if c.denominator != 1]
    if failures:
        raise NonIntegralChern(r, failures)
    return cK, cE


def chern_bounds_check(e: ChernVector, r: int) -> bool:
    """``0 <= e_i <= (r/2)^i`` for every ``i >= 1``."""
    half = Fraction(r, 2)
    return all(0 <= c <= half**i for i, c in enumerate(e.coeffs) if i >= 1)


# -- the binomial determinant -----------------------------------------------------------

def _gen_binom(n: int, k: int) -> int:
    """Coefficient of ``h^k`` in ``(1+h)^n``, for any integer ``n``."""
    if k < 0:
        return 0
    out = Fraction(1)
    for t in range(k):
        out = out * (n - t) / (t + 1)
    return int(out)


def _binom(n: int, j: int) -> int:
    return comb(n, j) if 0 <= j <= n else 0


@dataclass(frozen=True)
class WestwickDeterminant:
    matrix: DenseMatrix
    det: int
    stated_product: int  # prod_{j=0}^{m-r} j!, recorded for comparison
    closed_form: Fraction  # box-count product, see westwick_closed_form

    def to_json(self) -> dict:
        return {"matrix": self.matrix.to_json(), "det": self.det, "stated_product": self.stated_product,
                "closed_form": str(self.closed_form)}


def westwick_closed_form(m: int, n: int, r: int) -> Fraction:
    """``prod_{i=0}^{s} (n+i)! i! / ((k+i)! (n-k+i)!)`` with ``k = n-r+1``, ``s = m-r``.

    The determinant of ``(C(n, k+a-b))_{a,b=0..s}`` counts plane partitions
    in a box; this is that count written as a factorial product.
    """
    k, s = n - r + 1, m - r
    return prod((Fraction(factorial(n + i) * factorial(i), factorial(k + i) * factorial(n - k + i))
                 for i in range(s + 1)), start=Fraction(1))


def westwick_matrix(m: int, n: int, r: int) -> WestwickDeterminant:
    """``(C(n, i-j))`` for rows ``i = n-r+1..m+n-2r+1`` and columns ``j = 0..m-r``."""
    if not 2 <= r <= m <= n:
        raise ValueError(f"need 2 <= r <= m <= n, got r={r}, m={m}, n={n}")
    l = m + n - 2 * r + 1
    rows = [[_binom(n, i - j) for j in range(m - r + 1)] for i in range(n - r + 1, l + 1)]
    M = DenseMatrix.from_rows(QQ, rows)
    det = mat_det(M)
    return WestwickDeterminant(M, int(det), prod(factorial(j) for j in range(m - r + 1)),
                               westwick_closed_form(m, n, r))


# -- bound tables ---------------------------------------------------------------------

EXACT, UPPER, LOWER, CONDITIONAL = "exact-value", "upper-bound", "lower-bound", "conditional"


@dataclass(frozen=True)
class BoundQuery:
    r: int
    m: int
    n: int | None = None
    symmetry: str = "general"

    def __post_init__(self):
        if self.symmetry not in ("general", "symmetric", "skew"):
            raise ValueError(f"unknown symmetry {self.symmetry!r}")
        if self.r < 1 or self.r > self.m:
            raise ValueError(f"need 1 <= r <= m, got r={self.r}, m={self.m}")
        if self.symmetry == "general":
            if self.n is None:
                object.__setattr__(self, "n", self.m)
            if self.n < self.m:
                raise ValueError(f"need m <= n, got m={self.m}, n={self.n}")


@dataclass(frozen=True)
class BoundEntry:
    quantity: str
    value: int
    status: str
    reason: str
    condition: str | None = None

    def to_json(self) -> dict:
        out = {"quantity": self.quantity, "value": self.value, "status": self.status, "reason": self.reason}
        if self.condition is not None:
            out["condition"] = self.condition
        return out


def bounds_table(q: BoundQuery) -> list[BoundEntry]:
    """Every applicable bound for the query, each tagged with its status.

    Quantities: ``l``, ``c``, ``lambda`` are maximal dimensions of constant
    rank ``r`` spaces (general, symmetric, skew); the ``_below`` variants are
    maximal dimensions of spaces avoiding the determinantal locus ``X_r``.
    """
    r, m = q.r, q.m
    out: list[BoundEntry] = []
    if q.symmetry == "general":
        n = q.n
        tag = f"({r},{m},{n})"
        out.append(BoundEntry(f"l{tag}", n - r + 1, LOWER, "band construction avoiding X_(r-1)"))
        if r >= 2:
            out.append(BoundEntry(f"l{tag}", m + n - 2 * r + 1, UPPER, "Chern-class bound"))
            ratio = factorial(m - 1) // factorial(r - 1)
            holds = ratio % (n - r + 1) != 0
            out.append(BoundEntry(f"l{tag}", n - r + 1, CONDITIONAL, "divisibility criterion",
                                  f"{n - r + 1} does not divide (m-1)!/(r-1)! = {ratio}: "
                                  + ("holds" if holds else "fails")))
            if holds:
                out.append(BoundEntry(f"l{tag}", n - r + 1, EXACT, "divisibility criterion"))
            if m == r + 1 and n == 2 * r - 1:
                out.append(BoundEntry(f"l{tag}", r + 1, EXACT, "special triple (r, r+1, 2r-1)"))
        out.append(BoundEntry(f"l_below{tag}", (m - r) * (n - r), EXACT, "dimension count of X_r"))
        return out
    tag = f"({r},{m})"
    if q.symmetry == "symmetric":
        if r % 2:
            out.append(BoundEntry(f"c{tag}", 1, EXACT, "odd rank forbids symmetric pencils"))
        else:
            out.append(BoundEntry(f"c{tag}", m - r + 1, LOWER, "doubled band construction"))
            out.append(BoundEntry(f"c{tag}", m - r + 1, EXACT, "even rank symmetric maximum"))
        if r >= 2:
            out.append(BoundEntry(f"c{tag}", 2 * m - 2 * r + 1, UPPER, "Chern-class bound with n = m"))
        out.append(BoundEntry(f"c_below{tag}", comb(m - r + 1, 2), EXACT, "dimension count of X_r"))
        return out
    # skew
    if r % 2 == 0:
        out.append(BoundEntry(f"lambda{tag}", m - r + 1, LOWER, "doubled band construction"))
        if r >= 2:
            out.append(BoundEntry(f"lambda{tag}", 2 * m - 2 * r + 1, UPPER, "Chern-class bound with n = m"))
        out.append(BoundEntry(f"lambda_below{tag}", comb(m - r, 2), EXACT, "dimension count of X_r"))
    else:
        out.append(BoundEntry(f"lambda{tag}", 0, EXACT, "skew matrices have even rank"))
    return out


def bound_value(q: BoundQuery, status: str = EXACT, prefix: str | None = None) -> int | None:
    """First value of the given status, optionally restricted to a quantity prefix."""
    for e in bounds_table(q):
        if e.status == status and (prefix is None or e.quantity.split("(")[0] == prefix):
            return e.value
    return None


# -- codimensions ----------------------------------------------------------------------

@dataclass(frozen=True)
class Codimensions:
    general: int
    symmetric: int
    skew: int | None  # None when r is odd


def skew_codim(r: int, m: int) -> int:
    if r % 2:
        raise ValueError(f"skew determinantal loci need even rank, got r={r}")
    if not 0 <= r <= m:
        raise ValueError(f"need 0 <= r <= m, got r={r}, m={m}")
    return comb(m - r, 2)


def codim_table(r: int, m: int, n: int | None = None) -> Codimensions:
    """Codimension of ``X_r`` (rank at most ``r``) in general, symmetric and skew matrices."""
    n = m if n is None else n
    if not 0 <= r <= min(m, n):
        raise ValueError(f"need 0 <= r <= min(m, n), got r={r}, m={m}, n={n}")
    return Codimensions((m - r) * (n - r), comb(m - r + 1, 2), None if r % 2 else skew_codim(r, m))


# -- smooth quadrics -----------------------------------------------------------------

def quadric_betti(r: int, i: int) -> int:
    """``b^i`` of a smooth quadric of dimension ``r-2`` in ``P^(r-1)``."""
    if r < 2:
        raise ValueError("need r >= 2")
    top = 2 * (r - 2)
    if not 0 <= i <= top:
        raise ValueError(f"degree {i} outside 0..{top}")
    if i == r - 2 and r % 2 == 0:
        return 2
    if i % 2 == 0 and i != r - 2:
        return 1
    return 0


def quadric_betti_numbers(r: int) -> list[int]:
    return [quadric_betti(r, i) for i in range(2 * (r - 2) + 1)]


def quadric_euler(r: int) -> int:
    return sum((-1) ** i * b for i, b in enumerate(quadric_betti_numbers(r)))
