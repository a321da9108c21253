"""Linear spaces of matrices and their rank certification.

A :class:`MatrixSpace` is a basis ``B_0, ..., B_{k-1}`` of ``m x n``
matrices; its elements are ``A(x) = sum x_i B_i``.  Certification answers
three questions exactly where possible:

* generic rank: the rank of ``A(x)`` over the function field;
* bounded rank ``r``: every ``(r+1)``-minor of ``A(x)`` vanishes identically;
* rank bounded below by ``r``: no nonzero ``x`` makes ``rank A(x) < r``.

Bounded rank is decided by evaluating ``A(1, y)`` on a grid ``S^(k-1)`` with
``|S| = r + 2``: a polynomial of degree at most ``r + 1`` vanishing on such a
grid vanishes identically.  Over Q the grid is evaluated modulo a prime
larger than a bound on every minor value, so the modular answer is exact.

Rank bounded below is decided by exhaustion over F_q (rational points), by
gcds of minors for pencils, and by a Macaulay-matrix emptiness test for
``k >= 3``: the variety of ``r x r`` minors is empty iff the ideal contains
every monomial of degree ``k(r-1)+1``.  When no exact route applies the
certificate drops to Monte-Carlo sampling plus exhaustive checks of
reductions modulo small primes, and says so.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from itertools import combinations_with_replacement
from math import comb, lcm, prod
from typing import Sequence

import gmpy2

from crank import kernels
from crank._util import DEFAULT_BUDGET, BudgetExceeded, parallel_map, split_range, subseed, default_workers
from crank.field import QQ, FieldSpec, GF
from crank.linalg import DenseMatrix, mat_rank, rank_of
from crank.poly import MultiPoly, PolyMatrix, gcd_univariate, minors, poly_det

GENERAL, SYMMETRIC, SKEW = "general", "symmetric", "skew"
SYMMETRIES = (GENERAL, SYMMETRIC, SKEW)

DEFAULT_SAMPLES = 8
DEFAULT_HEIGHT = 100
DEFAULT_PRIMES = (3, 5, 7, 11)
LARGE_PRIME = 2147483647  # 2**31 - 1, the largest modulus the compiled kernels take
MACAULAY_MAX_COLUMNS = 1500
MINOR_ENUMERATION_LIMIT = 2000


class DependentBasis(ValueError):
    pass


@dataclass(frozen=True)
class MatrixSpace:
    field: FieldSpec
    m: int
    n: int
    basis: tuple
    symmetry: str = GENERAL
    metadata: dict = dc_field(default_factory=dict, compare=False, hash=False)

    @property
    def k(self) -> int:
        return len(self.basis)

    @property
    def dim(self) -> int:
        return len(self.basis)

    def element(self, coeffs: Sequence) -> DenseMatrix:
        F = self.field
        c = [F(x) for x in coeffs]
        if len(c) != self.k:
            raise ValueError(f"expected {self.k} coefficients, got {len(c)}")
        grid = [[F.zero] * self.n for _ in range(self.m)]
        for ci, B in zip(c, self.basis):
            if ci:
                for i, row in enumerate(B.entries):
                    g = grid[i]
                    for j, v in enumerate(row):
                        if v:
                            g[j] = F.norm(g[j] + ci * v)
        return DenseMatrix(F, self.m, self.n, tuple(tuple(r) for r in grid))

    def with_metadata(self, **extra) -> "MatrixSpace":
        md = dict(self.metadata)
        md.update(extra)
        return MatrixSpace(self.field, self.m, self.n, self.basis, self.symmetry, md)

    def reduce_mod(self, p: int) -> "MatrixSpace":
        """Reduction of a rational space mod ``p`` (raises if undefined or dependent)."""
        if not self.field.is_rational:
            raise ValueError("only rational spaces can be reduced")
        F = GF(p)
        mats = [DenseMatrix.from_rows(F, B.reduce_mod(p)) for B in self.basis]
        return from_basis(F, self.m, self.n, mats)

    def integer_basis(self) -> list[list[list[int]]]:
        """Basis matrices scaled to integers (rational spaces) or lifted (F_p)."""
        out = []
        for B in self.basis:
            if self.field.is_rational:
                L = lcm(*(x.denominator for x in B.flatten())) if B.rows and B.cols else 1
                out.append([[int(x * L) for x in r] for r in B.entries])
            else:
                out.append([[self.field.lift(x) for x in r] for r in B.entries])
        return out

    def to_json(self) -> dict:
        out = {
            "field": self.field.to_json(),
            "rows": self.m,
            "cols": self.n,
            "symmetry": self.symmetry,
            "basis": [B.to_json() for B in self.basis],
        }
        if self.metadata:
            out["metadata"] = self.metadata
        return out

    @classmethod
    def from_json(cls, data: dict) -> "MatrixSpace":
        for key in ("field", "rows", "cols", "basis"):
            if key not in data:
                raise ValueError(f"matrix space JSON is missing field {key!r}")
        F = FieldSpec.from_json(data["field"])
        mats = []
        for idx, B in enumerate(data["basis"]):
            try:
                mats.append(DenseMatrix.from_json(F, B))
            except (ValueError, ZeroDivisionError) as exc:
                raise ValueError(f"basis[{idx}]: {exc}") from None
        A = from_basis(F, data["rows"], data["cols"], mats)
        declared = data.get("symmetry")
        if declared is not None and declared != A.symmetry:
            raise ValueError(f"declared symmetry {declared!r} but the basis is {A.symmetry!r}")
        return A.with_metadata(**data.get("metadata", {})) if data.get("metadata") else A


def detect_symmetry(mats: Sequence[DenseMatrix]) -> str:
    if all(B.is_symmetric() for B in mats):
        return SYMMETRIC
    if all(B.is_skew() for B in mats):
        return SKEW
    return GENERAL


def from_basis(field: FieldSpec, m: int, n: int, matrices: Sequence) -> MatrixSpace:
    """Validate a basis and tag its symmetry class."""
    if not matrices:
        raise ValueError("a matrix space needs at least one basis matrix")
    mats = []
    for B in matrices:
        if not isinstance(B, DenseMatrix):
            B = DenseMatrix.from_rows(field, B)
        if B.field != field:
            raise ValueError(f"basis matrix over {B.field}, expected {field}")
        if B.shape != (m, n):
            raise ValueError(f"basis matrix has shape {B.shape}, expected {(m, n)}")
        mats.append(B)
    if rank_of(field, [B.flatten() for B in mats]) < len(mats):
        raise DependentBasis("basis matrices are linearly dependent")
    return MatrixSpace(field, m, n, tuple(mats), detect_symmetry(mats))


def to_polymatrix(A: MatrixSpace) -> PolyMatrix:
    return PolyMatrix.from_linear(list(A.basis))


# -- generic rank --------------------------------------------------------------

@dataclass(frozen=True)
class GenericRank:
    rank: int
    samples: int
    failure_bound: Fraction
    exact: bool

    def __int__(self) -> int:
        return self.rank


def sample_points(A: MatrixSpace, count: int, rng: random.Random, height: int = DEFAULT_HEIGHT) -> list[list]:
    F = A.field
    pts = []
    while len(pts) < count:
        x = [F.random_element(rng, height) for _ in range(A.k)]
        if any(x):
            pts.append(x)
    return pts


def generic_rank(A: MatrixSpace, seed=0, samples: int = DEFAULT_SAMPLES,
                 height: int = DEFAULT_HEIGHT) -> GenericRank:
    """Max rank over random points, then confirmed by an exact bounded-rank check.

    ``failure_bound`` is the Schwartz-Zippel probability that every sample
    misses the generic rank (degree ``min(m,n)`` over ``2*height+1`` values,
    or ``q`` values over F_q).  The confirmation makes the result exact; if
    it fails the rank is recomputed by symbolic elimination.
    """
    rng = seed if isinstance(seed, random.Random) else random.Random(subseed(seed, "generic_rank"))
    F = A.field
    best = 0
    for x in sample_points(A, samples, rng, height):
        best = max(best, mat_rank(A.element(x)))
    width = F.p if F.is_finite else 2 * height + 1
    bound = min(Fraction(1), Fraction(min(A.m, A.n), width)) ** samples
    if best >= min(A.m, A.n) or bounded_rank_check(A, best):
        return GenericRank(best, samples, bound, True)
    from crank.poly import symbolic_rank
    return GenericRank(symbolic_rank(to_polymatrix(A)), samples, bound, True)


# -- bounded rank ----------------------------------------------------------------

def _minor_value_bound(ints: list, r: int, base: int) -> int:
    """Bound on |(r+1)-minor| of ``B_0 + sum y_i B_i`` for ``0 <= y_i < base``."""
    m, n = len(ints[0]), len(ints[0][0])
    E = [[abs(ints[0][i][j]) + (base - 1) * sum(abs(B[i][j]) for B in ints[1:]) for j in range(n)]
         for i in range(m)]
    t = r + 1
    rows = sorted((sum(row) for row in E), reverse=True)[:t]
    cols = sorted((sum(E[i][j] for i in range(m)) for j in range(n)), reverse=True)[:t]
    return min(prod(rows), prod(cols))


def _grid_all_bounded(offset, dirs, p: int, r: int, workers: int | None, budget: int) -> bool:
    base = r + 2
    total = base ** len(dirs)
    if total > budget:
        raise BudgetExceeded(f"bounded-rank grid has {total} points, budget {budget}")
    chunks = split_range(total, 4 * (workers or default_workers()))

    def run(ch):
        return kernels.grid_scan(offset, dirs, p, base, 0, r, ch[0], ch[1])[2]

    return all(bad < 0 for bad in parallel_map(run, chunks, workers))


def _integer_bounded(ints: list, r: int, workers, budget) -> bool:
    """Exact test that every (r+1)-minor of the integer pencil vanishes identically."""
    bound = _minor_value_bound(ints, r, r + 2)
    P = LARGE_PRIME if bound < LARGE_PRIME else int(gmpy2.next_prime(bound))
    red = [[[x % P for x in row] for row in B] for B in ints]
    return _grid_all_bounded(red[0], red[1:], P, r, workers, budget)


def bounded_rank_check(A: MatrixSpace, r: int, workers: int | None = 1,
                       budget: int = DEFAULT_BUDGET) -> bool:
    """True iff every ``(r+1)``-minor of ``A(x)`` is identically zero."""
    if r < 0:
        raise ValueError("rank bound must be non-negative")
    if r >= min(A.m, A.n):
        return True
    F = A.field
    if A.k == 1:
        return mat_rank(A.basis[0]) <= r
    ints = A.integer_basis()
    if F.is_rational:
        return _integer_bounded(ints, r, workers, budget)
    p = F.p
    if p >= r + 2:
        red = [[[x % p for x in row] for row in B] for B in ints]
        return _grid_all_bounded(red[0], red[1:], p, r, workers, budget)
    # small p: vanishing over Z implies vanishing mod p; otherwise eliminate symbolically
    if _integer_bounded(ints, r, workers, budget):
        return True
    from crank.poly import symbolic_rank
    return symbolic_rank(to_polymatrix(A)) <= r


# -- exhaustive enumeration over F_q --------------------------------------------

def projective_count(q: int, k: int) -> int:
    return (q**k - 1) // (q - 1)


def point_from_index(q: int, k: int, j: int, idx: int) -> list[int]:
    """Canonical representative: first nonzero coordinate ``j`` equal to 1."""
    x = [0] * k
    x[j] = 1
    for pos in range(k - 1, j, -1):
        x[pos] = idx % q
        idx //= q
    return x


@dataclass(frozen=True)
class ExhaustiveScan:
    min_rank: int
    max_rank: int
    points: int
    witness: tuple | None  # first point (canonical order) with rank outside the requested window


def exhaustive_scan(A: MatrixSpace, lo: int = 0, hi: int | None = None, workers: int | None = 1,
                    budget: int = DEFAULT_BUDGET) -> ExhaustiveScan:
    """Rank range over every F_q-rational projective point of ``A``.

    With a window ``[lo, hi]`` the scan also reports the first point outside
    it (canonical order: by first nonzero position, then big-endian digits);
    the min/max are always computed over all points.
    """
    F = A.field
    if not F.is_finite:
        raise ValueError("exhaustive enumeration needs a finite field")
    q, k = F.p, A.k
    total = projective_count(q, k)
    if total > budget:
        raise BudgetExceeded(f"{total} projective points exceed the budget {budget}")
    hi = min(A.m, A.n) if hi is None else hi
    mats = [[list(r) for r in B.entries] for B in A.basis]
    nchunks = 4 * (workers or default_workers())
    tasks = []
    for j in range(k):
        cnt = q ** (k - 1 - j)
        share = max(1, round(nchunks * cnt / total))
        tasks.extend((j, a, b) for a, b in split_range(cnt, share))

    def run(task):
        j, a, b = task
        full = kernels.grid_scan(mats[j], mats[j + 1:], q, q, 0, min(A.m, A.n), a, b)
        bad = -1
        if full[0] < lo or full[1] > hi:
            bad = kernels.grid_scan(mats[j], mats[j + 1:], q, q, lo, hi, a, b)[2]
        return full[0], full[1], bad

    results = parallel_map(run, tasks, workers)
    witness = None
    for (j, _, _), (_, _, bad) in zip(tasks, results):
        if bad >= 0:
            witness = tuple(point_from_index(q, k, j, bad))
            break
    return ExhaustiveScan(min(r[0] for r in results), max(r[1] for r in results), total, witness)


def min_rank_exhaustive(A: MatrixSpace, workers: int | None = 1, budget: int = DEFAULT_BUDGET) -> int:
    """Minimum rank over one representative of every nonzero projective point."""
    return exhaustive_scan(A, workers=workers, budget=budget).min_rank


# -- pencils ---------------------------------------------------------------------

def _chart_polymatrix(A: MatrixSpace) -> PolyMatrix:
    """``B_0 + t*B_1`` as a univariate polynomial matrix."""
    F = A.field
    B0, B1 = A.basis
    rows = tuple(tuple(MultiPoly.univariate(F, [a, b]) for a, b in zip(r0, r1))
                 for r0, r1 in zip(B0.entries, B1.entries))
    return PolyMatrix(F, 1, rows)


def _pencil_drops_below(A: MatrixSpace, s: int, closure: bool) -> bool:
    """Whether some nonzero pencil element has rank < ``s``."""
    if s <= 0:
        return False
    if s > min(A.m, A.n):
        return True
    F = A.field
    if mat_rank(A.basis[1]) < s:  # the point at infinity of the chart
        return True
    g = gcd_univariate(_iter_minors_until_unit(_chart_polymatrix(A), s))
    if g.is_zero():
        return True
    if g.degree() == 0:
        return False
    if closure or F.is_rational:
        return True
    return any(not g.evaluate([t]) for t in F.elements())


def _iter_minors_until_unit(P: PolyMatrix, s: int):
    # gcd_univariate stops early on a unit; minors are still produced lazily in order
    from crank.poly import minor_index
    for R, C in minor_index(P.rows, P.cols, s):
        yield poly_det([[P.entries[i][j] for j in C] for i in R])


def min_rank_pencil(A: MatrixSpace, r: int, closure: bool = False) -> bool:
    """True iff no nonzero element of the pencil has rank below ``r``.

    Works in the chart ``B_0 + t*B_1`` (the gcd of the ``r x r`` minors) plus
    the point ``B_1`` at infinity.  Over Q a nonconstant gcd is a drop over
    the algebraic closure.  Over F_q the default asks about F_q-rational
    points (roots of the gcd in F_q); ``closure=True`` asks about the closure.
    """
    if A.k != 2:
        raise ValueError(f"pencil test needs a 2-dimensional space, got k={A.k}")
    return not _pencil_drops_below(A, r, closure)


def pencil_min_rank(A: MatrixSpace, closure: bool = False) -> int:
    """Exact minimum nonzero rank of a pencil, descending through minor sizes."""
    if A.k != 2:
        raise ValueError(f"pencil test needs a 2-dimensional space, got k={A.k}")
    s = min(A.m, A.n)
    while s > 1 and _pencil_drops_below(A, s, closure):
        s -= 1
    return s


# -- Macaulay emptiness test -------------------------------------------------------

def _monomials(k: int, d: int) -> list[tuple]:
    out = []
    for combo in combinations_with_replacement(range(k), d):
        e = [0] * k
        for v in combo:
            e[v] += 1
        out.append(tuple(e))
    return sorted(out, reverse=True)


def _macaulay_full_rank(forms: list[MultiPoly], k: int, deg: int, D: int, p: int) -> bool:
    cols = {e: i for i, e in enumerate(_monomials(k, D))}
    shifts = _monomials(k, D - deg)
    rows = []
    for g in forms:
        for mu in shifts:
            row = [0] * len(cols)
            for e, c in g.terms.items():
                row[cols[tuple(a + b for a, b in zip(e, mu))]] = int(c)
            rows.append(row)
    return kernels.rank_mod(rows, p) == len(cols)


def _random_minor_combination(A: MatrixSpace, F: FieldSpec, mats: list, r: int, rng: random.Random) -> MultiPoly:
    """``det(P A(x) Q)`` for random ``P`` (r x m) and ``Q`` (n x r): a combination of r x r minors."""
    p = F.p
    P = [[rng.randrange(p) for _ in range(A.m)] for _ in range(r)]
    Q = [[rng.randrange(p) for _ in range(r)] for _ in range(A.n)]
    comp = []
    for B in mats:
        PB = [[sum(P[i][a] * B[a][j] for a in range(A.m)) % p for j in range(A.n)] for i in range(r)]
        comp.append([[sum(PB[i][b] * Q[b][j] for b in range(A.n)) % p for j in range(r)] for i in range(r)])
    grid = [[MultiPoly.linear(F, [C[i][j] for C in comp]) for j in range(r)] for i in range(r)]
    return poly_det(grid)


def closure_rank_drop(A: MatrixSpace, r: int, seed=0, extra_forms: int = 2) -> bool | None:
    """Does some nonzero point over the algebraic closure have rank < ``r``?

    Returns ``False`` when the Macaulay matrix of the ``r x r`` minors has
    full column rank in degree ``k(r-1)+1`` (a proof of emptiness; over Q it
    is computed mod a large prime, and full rank mod p implies full rank over
    Q).  Returns ``True`` when the test with all minors is rank deficient
    (exact over F_q; over Q it is exact unless the prime is unlucky, which
    the certificate records as evidence).  ``None`` means the matrix was
    too large to build.
    """
    k = A.k
    if r <= 0:
        return False
    if r > min(A.m, A.n):
        return True
    D = k * (r - 1) + 1
    if comb(D + k - 1, k - 1) > MACAULAY_MAX_COLUMNS:
        return None
    p = LARGE_PRIME if A.field.is_rational else A.field.p
    F = GF(p)
    mats = [[[x % p for x in row] for row in B] for B in A.integer_basis()]
    rng = random.Random(subseed(seed, "macaulay"))
    forms = [_random_minor_combination(A, F, mats, r, rng) for _ in range(k + extra_forms)]
    forms = [g for g in forms if g]
    if forms and _macaulay_full_rank(forms, k, r, D, p):
        return False
    if comb(A.m, r) * comb(A.n, r) > MINOR_ENUMERATION_LIMIT:
        return None
    P = PolyMatrix.from_linear([DenseMatrix.from_rows(F, B) for B in mats])
    all_minors = [g for g in minors(P, r) if g]
    if not all_minors:
        return True
    return not _macaulay_full_rank(all_minors, k, r, D, p)


# -- certificates ----------------------------------------------------------------------

@dataclass(frozen=True)
class RankCertificate:
    generic_rank: int
    min_nonzero_rank: int
    max_rank: int
    constant: bool
    mode: str
    status: str
    samples: int
    seed: int
    rank: int
    field: FieldSpec = QQ
    scope: str = "closure"
    details: dict = dc_field(default_factory=dict, compare=False, hash=False)

    def to_json(self) -> dict:
        return {
            "generic_rank": self.generic_rank,
            "min_nonzero_rank": self.min_nonzero_rank,
            "max_rank": self.max_rank,
            "constant": self.constant,
            "mode": self.mode,
            "status": self.status,
            "samples": self.samples,
            "seed": self.seed,
            "rank": self.rank,
            "field": self.field.to_json(),
            "scope": self.scope,
            "details": self.details,
        }

    @classmethod
    def from_json(cls, d: dict) -> "RankCertificate":
        return cls(d["generic_rank"], d["min_nonzero_rank"], d["max_rank"], d["constant"], d["mode"],
                   d["status"], d["samples"], d["seed"], d["rank"], FieldSpec.from_json(d["field"]),
                   d.get("scope", "closure"), d.get("details", {}))


def constant_rank_check(A: MatrixSpace, r: int, seed: int = 0, workers: int | None = 1,
                        budget: int = DEFAULT_BUDGET, samples: int = DEFAULT_SAMPLES,
                        primes: Sequence[int] = DEFAULT_PRIMES, scope: str | None = None) -> RankCertificate:
    """Certify that every nonzero element of ``A`` has rank exactly ``r``.

    ``scope`` is ``"rational"`` (F_q-rational points, the default over F_q)
    or ``"closure"`` (the algebraic closure; the only scope over Q).
    """
    F = A.field
    if scope is None:
        scope = "rational" if F.is_finite else "closure"
    if scope not in ("rational", "closure"):
        raise ValueError(f"unknown scope {scope!r}")
    if F.is_rational and scope != "closure":
        raise ValueError("over Q only the closure scope is available")
    upper = bounded_rank_check(A, r, workers, budget)
    gr = generic_rank(A, seed)
    details: dict = {"bounded_rank": upper}

    if F.is_finite:
        scan = exhaustive_scan(A, r, r, workers, budget)
        mn = scan.min_rank
        constant = upper and mn == r and gr.rank == r
        details["points"] = scan.points
        if scan.witness is not None:
            details["witness"] = list(scan.witness)
        mode = "minors_exact+exhaustive"
        if scope == "closure" and constant:
            if A.k == 2:
                ok = kernels.pencil_closure_constant(
                    [list(x) for x in A.basis[0].entries], [list(x) for x in A.basis[1].entries], F.p, r)
                details["closure_test"] = "pencil_kronecker"
                drop = not ok
            elif A.k == 1:
                drop = False
            else:
                drop = closure_rank_drop(A, r, seed)
                details["closure_test"] = "macaulay"
            details["closure_drop"] = drop
            if drop is None:
                # every F_q-point has rank r; the closure test was too large to decide
                return RankCertificate(gr.rank, mn, gr.rank, True, mode + "+macaulay", "evidence",
                                       scan.points, seed, r, F, scope, details)
            constant = not drop
            mode += "+pencil_kronecker" if A.k == 2 else "+macaulay"
        return RankCertificate(gr.rank, mn, gr.rank, constant, mode, "proven", scan.points, seed, r, F,
                               scope, details)

    # over Q: closure semantics
    if A.k == 1:
        rk = mat_rank(A.basis[0])
        return RankCertificate(rk, rk, rk, rk == r, "minors_exact", "proven", 1, seed, r, F, scope, details)
    if A.k == 2:
        mn = pencil_min_rank(A, closure=True)
        constant = upper and mn == r
        return RankCertificate(gr.rank, mn, gr.rank, constant, "minors_exact+pencil_gcd", "proven", 0,
                               seed, r, F, scope, details)

    drop = closure_rank_drop(A, r, seed) if upper and gr.rank == r else None
    if drop is False:
        return RankCertificate(gr.rank, r, gr.rank, True, "minors_exact+macaulay", "proven", 0, seed, r, F,
                               scope, details)

    rng = random.Random(subseed(seed, "monte_carlo"))
    sample_min = min(mat_rank(A.element(x)) for x in sample_points(A, samples, rng))
    reductions = {}
    for p in primes:
        try:
            Ap = A.reduce_mod(p)
            reductions[str(p)] = exhaustive_scan(Ap, workers=workers, budget=budget).min_rank
        except (ZeroDivisionError, DependentBasis):
            reductions[str(p)] = "undefined"
        except BudgetExceeded:
            reductions[str(p)] = "over budget"
    details["sample_min"] = sample_min
    details["mod_p_min_rank"] = reductions
    if drop is True:
        details["macaulay"] = "rank drop over the closure detected modulo a large prime"
        return RankCertificate(gr.rank, min(sample_min, r - 1), gr.rank, False, "minors_exact+macaulay",
                               "evidence", samples, seed, r, F, scope, details)
    mod_ok = any(v == r for v in reductions.values())
    constant = upper and gr.rank == r and sample_min == r and mod_ok
    return RankCertificate(gr.rank, sample_min, gr.rank, constant, "minors_exact+monte_carlo", "evidence",
                           samples, seed, r, F, scope, details)
