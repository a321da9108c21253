"""Exhaustive and randomized search for constant-rank subspaces over F_q.

Subspaces of an ambient space (coordinates ``0..N-1`` in the ambient's
standard basis) are enumerated by their reduced row echelon bases.  A child
adds one vector whose pivot is smaller than every existing pivot, with a
leading 1 and zeros in the existing pivot columns; the parent of an echelon
basis is obtained by dropping its first row.  Every subspace therefore
appears exactly once in the tree.

A candidate survives when every new projective point ``v + sum c_i s_i`` has
rank ``r``.  Two semantics are supported:

* ``closure`` (default): the space must have constant rank ``r`` over the
  algebraic closure of F_q, the finite-field shadow of the statement over C.
  Pencils are tested exactly by Kronecker minimal indices inside the
  compiled scan; larger spaces by an exact bounded-rank check and a
  Macaulay-matrix emptiness test.
* ``rational``: only F_q-rational points are required to have rank ``r``.
  Over tiny fields this admits spaces with no analogue over C; such hits
  are reported as field-dependence findings.
"""

from __future__ import annotations

import random
import threading
import time
from dataclasses import dataclass, field as dc_field

from crank import kernels
from crank._util import BudgetExceeded, default_workers, parallel_map, split_range, subseed
from crank.constructions import Ambient
from crank.field import FieldSpec
from crank.linalg import DenseMatrix, rref
from crank.matspace import (GENERAL, SKEW, SYMMETRIC, MatrixSpace, bounded_rank_check, closure_rank_drop,
                            constant_rank_check, from_basis)

CLOSURE, RATIONAL = "closure", "rational"
DEFAULT_NODE_BUDGET = 10**9
SCAN_CHUNK = 1 << 20


@dataclass(frozen=True)
class SearchConfig:
    field: FieldSpec
    ambient: Ambient
    rank: int
    mode: str = "exhaustive"
    budget: int = DEFAULT_NODE_BUDGET
    seed: int = 0
    workers: int | None = None
    semantics: str = CLOSURE

    def __post_init__(self):
        if not self.field.is_finite:
            raise ValueError("search runs over a finite field")
        if isinstance(self.ambient, str):
            object.__setattr__(self, "ambient", Ambient.parse(self.ambient))
        if self.mode not in ("exhaustive", "randomized"):
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.semantics not in (CLOSURE, RATIONAL):
            raise ValueError(f"unknown semantics {self.semantics!r}")
        if self.budget <= 0:
            raise ValueError("budget must be positive")
        if not 1 <= self.rank <= min(self.ambient.m, self.ambient.n):
            raise ValueError(f"rank {self.rank} impossible in {self.ambient}")


@dataclass
class SearchResult:
    max_dim_found: int
    witness: MatrixSpace | None
    exhausted: bool
    nodes_visited: int
    wall_time: float
    config: SearchConfig
    notes: list = dc_field(default_factory=list)

    def to_json(self, timing: bool = False) -> dict:
        cfg = self.config
        out = {
            "field": cfg.field.to_json(),
            "ambient": str(cfg.ambient),
            "rank": cfg.rank,
            "mode": cfg.mode,
            "semantics": cfg.semantics,
            "max_dim_found": self.max_dim_found,
            "exhausted": self.exhausted,
            "nodes_visited": self.nodes_visited,
            "witness": self.witness.to_json() if self.witness is not None else None,
            "notes": list(self.notes),
        }
        if timing:
            out["wall_time"] = round(self.wall_time, 3)
        return out


class _Budget:
    def __init__(self, limit: int):
        self.limit = limit
        self.used = 0
        self.exceeded = False
        self._lock = threading.Lock()

    def take(self, n: int) -> bool:
        with self._lock:
            if self.exceeded or self.used + n > self.limit:
                self.exceeded = True
                return False
            self.used += n
            return True


class _Searcher:
    def __init__(self, cfg: SearchConfig):
        self.cfg = cfg
        self.q = cfg.field.p
        self.F = cfg.field
        self.amb = cfg.ambient
        self.E = [[list(r) for r in B.entries] for B in cfg.ambient.basis(cfg.field)]
        self.N = len(self.E)
        self.r = cfg.rank
        self.closure = cfg.semantics == CLOSURE
        self.inconclusive = 0
        self._lock = threading.Lock()

    def matrix(self, v) -> list[list[int]]:
        q = self.q
        m, n = self.amb.m, self.amb.n
        out = [[0] * n for _ in range(m)]
        for c, x in enumerate(v):
            if x:
                for i, row in enumerate(self.E[c]):
                    o = out[i]
                    for j, y in enumerate(row):
                        if y:
                            o[j] = (o[j] + x * y) % q
        return out

    def space(self, rows) -> MatrixSpace:
        return from_basis(self.F, self.amb.m, self.amb.n,
                          [DenseMatrix.from_rows(self.F, self.matrix(v)) for v in rows])

    def candidate(self, lead: int, free: list[int], idx: int) -> list[int]:
        v = [0] * self.N
        v[lead] = 1
        for pos in range(len(free) - 1, -1, -1):
            v[free[pos]] = idx % self.q
            idx //= self.q
        return v

    def scan(self, span_rows, lead, free, start, stop, budget: _Budget) -> list[int] | None:
        """Survivor indices among candidates ``start..stop``; ``None`` if the budget ran out."""
        span = [self.matrix(v) for v in span_rows]
        pencil = self.closure and len(span_rows) == 1
        out = []
        for a, b in split_range(stop - start, max(1, (stop - start) // SCAN_CHUNK)):
            if not budget.take(b - a):
                return None
            surv, _ = kernels.extend_scan(self.E, span, free, lead, self.q, self.r, start + a, start + b, pencil)
            out.extend(surv)
        return out

    def accept(self, rows) -> bool:
        """Extra exact checks for spaces of dimension >= 3 under closure semantics."""
        if not self.closure or len(rows) < 3:
            return True
        S = self.space(rows)
        if not bounded_rank_check(S, self.r):
            return False
        drop = closure_rank_drop(S, self.r, seed=self.cfg.seed)
        if drop is None:
            with self._lock:
                self.inconclusive += 1
            return False
        return not drop

    def children(self, rows, pivots, budget: _Budget):
        """Canonical one-vector extensions, in canonical order; ``None`` on budget exhaustion."""
        low = min(pivots) if pivots else self.N
        taken = set(pivots)
        for lead in range(low):
            free = [c for c in range(lead + 1, self.N) if c not in taken]
            surv = self.scan(rows, lead, free, 0, self.q ** len(free), budget)
            if surv is None:
                yield None
                return
            for idx in surv:
                v = self.candidate(lead, free, idx)
                child = [v] + [list(r) for r in rows]
                if self.accept(child):
                    yield child, [lead] + list(pivots)

    def dfs(self, rows, pivots, budget: _Budget, best: list):
        """Depth-first search below a node; ``best = [dim, rows]`` is updated in place."""
        d = len(rows)
        if d > best[0]:
            best[0], best[1] = d, [list(r) for r in rows]
        if d + min(pivots) <= best[0]:
            return True
        for item in self.children(rows, pivots, budget):
            if item is None:
                return False
            if not self.dfs(item[0], item[1], budget, best):
                return False
        return True


def _echelon(F: FieldSpec, rows) -> tuple[list, list[int]]:
    R, piv = rref(F, rows)
    return [list(r) for r in R], piv


def max_constant_rank_dim(cfg: SearchConfig) -> SearchResult:
    """Largest dimension of a constant-rank-``r`` subspace of the ambient space."""
    if cfg.mode == "randomized":
        return _randomized_max(cfg)
    t0 = time.perf_counter()
    S = _Searcher(cfg)
    q, N = S.q, S.N
    roots = (q**N - 1) // (q - 1)
    if roots > cfg.budget:
        raise BudgetExceeded(f"{roots} root candidates exceed the node budget {cfg.budget}")
    budget = _Budget(cfg.budget)
    workers = cfg.workers or default_workers()
    tasks = []
    for lead in range(N):
        free = list(range(lead + 1, N))
        cnt = q ** len(free)
        tasks.extend((lead, free, a, b) for a, b in split_range(cnt, max(1, cnt // SCAN_CHUNK)))

    def scan_roots(task):
        lead, free, a, b = task
        surv = S.scan([], lead, free, a, b, budget)
        return None if surv is None else [(S.candidate(lead, free, idx), lead) for idx in surv]

    scanned = parallel_map(scan_roots, tasks, workers)
    complete = all(x is not None for x in scanned)
    roots_found = [root for part in scanned if part for root in part]

    def explore(root):
        best = [0, None]
        ok = S.dfs([root[0]], [root[1]], budget, best)
        return best, ok

    best_dim, best_rows = 0, None
    for best, ok in parallel_map(explore, roots_found, workers):
        complete = complete and ok
        if best[0] > best_dim:
            best_dim, best_rows = best[0], best[1]
    witness = None
    notes = []
    if best_rows is not None:
        R, _ = _echelon(cfg.field, best_rows)
        witness = S.space(R)
        cert = constant_rank_check(witness, cfg.rank, seed=cfg.seed,
                                   scope="closure" if S.closure else "rational")
        if not (cert.constant and cert.status == "proven"):
            raise AssertionError("search produced a witness that does not certify")
        witness = witness.with_metadata(certificate=cert.to_json())
    if S.inconclusive:
        notes.append(f"{S.inconclusive} candidate spaces skipped: closure test too large")
    if witness is not None and not S.closure and best_dim >= 2:
        over_closure = constant_rank_check(witness, cfg.rank, seed=cfg.seed, scope="closure")
        if not over_closure.constant:
            notes.append(f"field-dependence finding: the {best_dim}-dimensional witness has constant rank "
                         f"{cfg.rank} on F{S.q}-points only; its rank drops over the algebraic closure")
        elif over_closure.status != "proven":
            notes.append(f"the {best_dim}-dimensional witness is undecided over the algebraic closure")
    return SearchResult(best_dim, witness, complete and not budget.exceeded, budget.used,
                        time.perf_counter() - t0, cfg, notes)


def ambient_of(A: MatrixSpace) -> Ambient:
    if A.symmetry == SYMMETRIC:
        return Ambient("sym", A.m, A.m)
    if A.symmetry == SKEW:
        return Ambient("skew", A.m, A.m)
    return Ambient("hom", A.m, A.n)


def verify_no_extension(A: MatrixSpace, r: int, budget: int = DEFAULT_NODE_BUDGET, workers: int | None = None,
                        semantics: str = CLOSURE, ambient: Ambient | None = None) -> bool:
    """True iff no single matrix outside ``A`` extends it to a constant-rank-``r`` space."""
    amb = ambient or ambient_of(A)
    cfg = SearchConfig(A.field, amb, r, budget=budget, workers=workers, semantics=semantics)
    S = _Searcher(cfg)
    q, N = S.q, S.N
    coords = [amb.coordinates(B) for B in A.basis]
    rows, pivots = _echelon(A.field, coords)
    total = (q ** (N - len(rows)) - 1) // (q - 1)
    if total > budget:
        raise BudgetExceeded(f"{total} extension candidates exceed the budget {budget}")
    b = _Budget(budget)
    taken = set(pivots)
    tasks = []
    for lead in range(N):
        if lead in taken:
            continue
        free = [c for c in range(lead + 1, N) if c not in taken]
        cnt = q ** len(free)
        parts = max(1, min(cnt, round(4 * (workers or default_workers()) * cnt / max(total, 1))))
        tasks.extend((lead, free, a, c) for a, c in split_range(cnt, parts))

    def run(task):
        lead, free, a, c = task
        surv = S.scan(rows, lead, free, a, c, b)
        if surv is None:
            raise BudgetExceeded("extension scan ran out of budget")
        return any(S.accept([S.candidate(lead, free, idx)] + rows) for idx in surv)

    return not any(parallel_map(run, tasks, workers))


def random_witness(cfg: SearchConfig, target_dim: int, restarts: int = 50, tries_per_step: int = 200) -> MatrixSpace | None:
    """Greedy random extension with restarts; the first certified ``target_dim`` space, if any."""
    S = _Searcher(cfg)
    scope = "closure" if S.closure else "rational"
    spent = 0
    for restart in range(restarts):
        rng = random.Random(subseed(cfg.seed, f"random_witness:{restart}"))
        rows: list = []
        stuck = False
        while len(rows) < target_dim and not stuck:
            stuck = True
            for _ in range(tries_per_step):
                spent += 1
                if spent > cfg.budget:
                    return None
                v = [rng.randrange(S.q) for _ in range(S.N)]
                R, _ = _echelon(cfg.field, rows + [v])
                if len(R) <= len(rows):
                    continue
                cand = S.space(R)
                cert = constant_rank_check(cand, cfg.rank, seed=cfg.seed, scope=scope)
                if cert.constant and cert.status == "proven":
                    rows = R
                    stuck = False
                    break
        if len(rows) == target_dim:
            W = S.space(rows)
            cert = constant_rank_check(W, cfg.rank, seed=cfg.seed, scope=scope)
            return W.with_metadata(certificate=cert.to_json(), restarts=restart)
    return None


def _randomized_max(cfg: SearchConfig) -> SearchResult:
    t0 = time.perf_counter()
    best = None
    dim = 1
    while dim <= cfg.ambient.dim:
        W = random_witness(cfg, dim)
        if W is None:
            break
        best = W
        dim += 1
    return SearchResult(best.k if best else 0, best, False, 0, time.perf_counter() - t0, cfg,
                        ["randomized search gives a lower bound only"])
