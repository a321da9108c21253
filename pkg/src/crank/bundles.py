"""Splitting types of the kernel and image bundles on lines.

On a line the space restricts to a pencil ``B(s,t) = s*X + t*Y`` acting on
column vectors.  The kernel bundle splits as ``K = sum O(-a_i)``; with the
multiplication map ``mult_d`` from degree-``d`` to degree-``(d+1)`` vectors,

    h0(K(d)) = cols*(d+1) - rank(mult_d) = sum_i max(0, d + 1 - a_i),

so ``#{a_i = d}`` is the second difference of ``h0(K(d))``.  The same on the
transposed pencil gives the cokernel degrees.  The rank is constant on the
line (over the algebraic closure) exactly when the two degree sums add up
to the rank; otherwise the line is a rank-drop witness.

The image ``E`` sits in ``O(1)^rows`` and is a quotient of ``O^cols``, so
``E(-2)`` has no sections and ``h0(E(d)) - h0(E(d-1)) = #{b_j >= -d}``.
``h0(E(d))`` is computed directly as the vectors of forms annihilated by
every left-kernel section, and cross-checked against the Euler
characteristic ``r(d+1) + sum a_i`` coming from the kernel sequence.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from itertools import product as iproduct
from typing import Sequence

from crank._util import BudgetExceeded, DEFAULT_BUDGET, parallel_map, subseed
from crank.field import FieldSpec
from crank.linalg import DenseMatrix, mat_kernel, mat_rank, rank_of
from crank.matspace import MatrixSpace, sample_points
from crank.poly import multiplication_matrix_pencil


class RankDropOnLine(ValueError):
    """The rank is not constant along the line."""

    def __init__(self, message: str, line=None):
        super().__init__(message)
        self.line = line


class InconsistentCohomology(ValueError):
    """Directly computed sections of ``E(d)`` disagree with the kernel sequence."""


@dataclass(frozen=True)
class SplittingType:
    degrees: tuple

    def __post_init__(self):
        object.__setattr__(self, "degrees", tuple(sorted((int(d) for d in self.degrees), reverse=True)))

    @property
    def rank(self) -> int:
        return len(self.degrees)

    @property
    def degree_sum(self) -> int:
        return sum(self.degrees)

    def to_json(self) -> list[int]:
        return list(self.degrees)

    def __str__(self) -> str:
        return "{" + ",".join(str(d) for d in self.degrees) + "}"


@dataclass(frozen=True)
class LineSplitting:
    kernel: SplittingType
    image: SplittingType
    cokernel: SplittingType
    rank: int
    kernel_h0: tuple  # h0(K(d)) for d = 0..D
    image_h0: tuple  # h0(E(d)) for d = -2..1


def _pencil(A: MatrixSpace, p: Sequence, q: Sequence) -> tuple[DenseMatrix, DenseMatrix]:
    F = A.field
    p = [F(x) for x in p]
    q = [F(x) for x in q]
    if len(p) != A.k or len(q) != A.k:
        raise ValueError(f"line points need {A.k} coordinates")
    if rank_of(F, [p, q]) < 2:
        raise ValueError("points spanning the line are linearly dependent")
    return A.element(p), A.element(q)


def _kernel_degrees(X: DenseMatrix, Y: DenseMatrix, r: int, cap: int) -> tuple[list[int], list[int]]:
    """Kernel degrees ``a_i`` (as positive numbers) and the ``h0(K(d))`` table."""
    cols = X.cols
    target = cols - r
    h = [0]  # h[d + 1] = h0(K(d)); h0(K(-1)) = 0
    degrees: list[int] = []
    prev_delta = 0
    d = 0
    while len(degrees) < target:
        if d > cap:
            raise RankDropOnLine(f"kernel sections never reach rank {target} up to degree {cap}")
        rank = mat_rank(multiplication_matrix_pencil(X, Y, d))
        h.append(cols * (d + 1) - rank)
        delta = h[-1] - h[-2]
        if delta > target:
            raise RankDropOnLine(f"kernel grows by {delta} > {target} at degree {d}")
        degrees.extend([d] * (delta - prev_delta))
        prev_delta = delta
        d += 1
    return degrees, h[1:]


def _image_h0(X: DenseMatrix, left_sections: list[tuple[int, tuple]], d: int) -> int:
    """``h0(E(d))``: degree-``(d+1)`` vectors of forms killed by every left-kernel section."""
    if d < -1:
        return 0
    F = X.field
    R = X.rows
    nw = R * (d + 2)
    conditions = []
    for e, y in left_sections:
        for c in range(e + d + 2):
            row = [F.zero] * nw
            for a in range(max(0, c - d - 1), min(e, c) + 1):
                b = c - a
                for i in range(R):
                    if y[a * R + i]:
                        row[b * R + i] = y[a * R + i]
            conditions.append(row)
    return nw - (rank_of(F, conditions) if conditions else 0)


def _left_sections(X: DenseMatrix, Y: DenseMatrix, max_degree: int) -> list[tuple[int, tuple]]:
    XT, YT = X.T, Y.T
    out = []
    for e in range(max_degree + 1):
        for v in mat_kernel(multiplication_matrix_pencil(XT, YT, e)):
            out.append((e, v))
    return out


def line_splitting(A: MatrixSpace, p: Sequence, q: Sequence, r: int | None = None) -> LineSplitting:
    """Kernel, cokernel and image splitting types on the line through ``p`` and ``q``."""
    X, Y = _pencil(A, p, q)
    if r is None:
        r = max(mat_rank(X), mat_rank(Y), mat_rank(X + Y))
    cap = min(A.m, A.n)
    line = (tuple(p), tuple(q))
    try:
        kdeg, kh = _kernel_degrees(X, Y, r, cap)
        cdeg, _ = _kernel_degrees(X.T, Y.T, r, cap)
    except RankDropOnLine as exc:
        raise RankDropOnLine(str(exc), line) from None
    if sum(kdeg) + sum(cdeg) != r:
        raise RankDropOnLine(
            f"minimal degree sums {sum(kdeg)} + {sum(cdeg)} != rank {r}: the rank drops on this line", line)
    sections = _left_sections(X, Y, max(cdeg, default=0))
    f = {d: _image_h0(X, sections, d) for d in (-2, -1, 0, 1)}
    for d in (-1, 0, 1):
        if f[d] != r * (d + 1) + sum(kdeg):
            raise InconsistentCohomology(
                f"h0(E({d})) = {f[d]} but the kernel sequence predicts {r * (d + 1) + sum(kdeg)}")
    counts_ge = {1: f[-1] - f[-2], 0: f[0] - f[-1]}
    if counts_ge[0] != r:
        raise InconsistentCohomology(f"image has {counts_ge[0]} nonnegative summands, expected rank {r}")
    image = [1] * counts_ge[1] + [0] * (counts_ge[0] - counts_ge[1])
    return LineSplitting(SplittingType([-a for a in kdeg]), SplittingType(image),
                         SplittingType([-a for a in cdeg]), r, tuple(kh), tuple(f[d] for d in (-2, -1, 0, 1)))


def kernel_splitting_on_line(A: MatrixSpace, p: Sequence, q: Sequence, r: int | None = None) -> SplittingType:
    return line_splitting(A, p, q, r).kernel


def image_splitting_on_line(A: MatrixSpace, p: Sequence, q: Sequence, r: int | None = None) -> SplittingType:
    return line_splitting(A, p, q, r).image


# -- sampling lines ---------------------------------------------------------------------

def line_count(q: int, k: int) -> int:
    """Number of lines in ``P^(k-1)`` over F_q."""
    return ((q**k - 1) * (q**k - q)) // ((q**2 - 1) * (q**2 - q))


def all_lines(F: FieldSpec, k: int):
    """Every line of ``P^(k-1)`` over F_q once, as the rows of a reduced echelon 2 x k matrix."""
    q = F.p
    for i in range(k):
        for j in range(i + 1, k):
            free_p = [c for c in range(i + 1, k) if c != j]
            free_q = list(range(j + 1, k))
            for vp in iproduct(range(q), repeat=len(free_p)):
                p = [0] * k
                p[i] = 1
                for c, v in zip(free_p, vp):
                    p[c] = v
                for vq in iproduct(range(q), repeat=len(free_q)):
                    qq = [0] * k
                    qq[j] = 1
                    for c, v in zip(free_q, vq):
                        qq[c] = v
                    yield p, qq


def sample_lines(A: MatrixSpace, num_lines: int, seed: int = 0, height: int = 100) -> list[tuple[list, list]]:
    F = A.field
    if F.is_finite and line_count(F.p, A.k) <= num_lines:
        return list(all_lines(F, A.k))
    lines = []
    for i in range(num_lines):
        rng = random.Random(subseed(seed, f"line:{i}"))
        while True:
            p, q = sample_points(A, 2, rng, height)
            if rank_of(F, [p, q]) == 2:
                break
        lines.append((p, q))
    return lines


@dataclass(frozen=True)
class UniformityReport:
    kernel_types: tuple
    image_types: tuple
    lines_checked: int
    failures: tuple  # (line, message) pairs

    @property
    def uniform(self) -> bool:
        return not self.failures and len(self.kernel_types) <= 1 and len(self.image_types) <= 1

    def to_json(self) -> dict:
        return {
            "kernel_types": [t.to_json() for t in self.kernel_types],
            "image_types": [t.to_json() for t in self.image_types],
            "lines_checked": self.lines_checked,
            "failures": [{"line": [[str(x) for x in pt] for pt in line], "error": msg}
                         for line, msg in self.failures],
        }


def uniformity_sample(A: MatrixSpace, num_lines: int, seed: int = 0, r: int | None = None,
                      workers: int | None = 1, budget: int = DEFAULT_BUDGET) -> UniformityReport:
    """Splitting types on ``num_lines`` seeded random lines (all lines when fewer exist)."""
    if A.k < 2:
        raise ValueError("a space of dimension 1 contains no lines")
    lines = sample_lines(A, num_lines, seed)
    if len(lines) > budget:
        raise BudgetExceeded(f"{len(lines)} lines exceed the budget {budget}")

    def run(line):
        try:
            return line_splitting(A, line[0], line[1], r), None
        except (RankDropOnLine, InconsistentCohomology) as exc:
            return None, str(exc)

    results = parallel_map(run, lines, workers)
    ktypes, itypes, failures = set(), set(), []
    for line, (res, err) in zip(lines, results):
        if err is not None:
            failures.append(((tuple(line[0]), tuple(line[1])), err))
        else:
            ktypes.add(res.kernel)
            itypes.add(res.image)
    order = lambda t: t.degrees
    return UniformityReport(tuple(sorted(ktypes, key=order)), tuple(sorted(itypes, key=order)), len(lines),
                            tuple(failures))
