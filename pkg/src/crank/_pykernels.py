"""Pure-Python implementations of the modular rank kernels.

These mirror :mod:`crank._kernels` (Cython) exactly, including enumeration
order and early-exit indices, so either backend produces identical results.
Matrices are integer arrays with entries already reduced into ``[0, p)``.
"""

from __future__ import annotations


def _rank_rows(a: list, p: int) -> int:
    rows = len(a)
    if rows == 0:
        return 0
    cols = len(a[0])
    r = 0
    for c in range(cols):
        if r == rows:
            break
        piv = -1
        for i in range(r, rows):
            if a[i][c]:
                piv = i
                break
        if piv < 0:
            continue
        a[r], a[piv] = a[piv], a[r]
        prow = a[r]
        inv = pow(prow[c], -1, p)
        if inv != 1:
            prow = a[r] = [x * inv % p for x in prow]
        for i in range(r + 1, rows):
            f = a[i][c]
            if f:
                a[i] = [(x - f * y) % p for x, y in zip(a[i], prow)]
        r += 1
    return r


def rank_mod(M, p: int) -> int:
    return _rank_rows([[int(x) % p for x in row] for row in M], p)


def _as_lists(M):
    return [[int(x) for x in row] for row in M]


def _addmul(T, D, k, p):
    for i in range(len(T)):
        Ti, Di = T[i], D[i]
        for j in range(len(Ti)):
            Ti[j] = (Ti[j] + k * Di[j]) % p


def grid_scan(offset, dirs, p: int, base: int, lo: int, hi: int, start: int, stop: int):
    """Ranks of ``offset + sum(y_i * dirs[i])`` over a digit grid.

    The point with index ``idx`` has digits ``y`` in ``[0, base)`` read
    big-endian (``dirs[0]`` most significant).  Scanning stops at the first
    rank outside ``[lo, hi]``; its index is returned, else ``-1``.
    """
    d = len(dirs)
    dirs = [_as_lists(D) for D in dirs]
    T = _as_lists(offset)
    digits = [0] * d
    rem = start
    for i in range(d - 1, -1, -1):
        digits[i] = rem % base
        rem //= base
    for i in range(d):
        if digits[i]:
            _addmul(T, dirs[i], digits[i], p)
    lo_seen, hi_seen = 1 << 30, -1
    for idx in range(start, stop):
        rk = _rank_rows([row[:] for row in T], p)
        lo_seen = min(lo_seen, rk)
        hi_seen = max(hi_seen, rk)
        if rk < lo or rk > hi:
            return lo_seen, hi_seen, idx
        for i in range(d - 1, -1, -1):
            if digits[i] == base - 1:
                digits[i] = 0
                _addmul(T, dirs[i], -(base - 1), p)
            else:
                digits[i] += 1
                _addmul(T, dirs[i], 1, p)
                break
    return lo_seen, hi_seen, -1


def _mult_rank(X, Y, d, p):
    R, C = len(X), len(X[0])
    M = [[0] * (C * (d + 1)) for _ in range(R * (d + 2))]
    for a in range(d + 1):
        for i in range(R):
            for j in range(C):
                M[a * R + i][a * C + j] = X[i][j]
                M[(a + 1) * R + i][a * C + j] = Y[i][j]
    return _rank_rows(M, p)


def pencil_closure_constant(X, Y, p: int, r: int) -> bool:
    """Whether ``sX + tY`` has rank exactly ``r`` at every point over the closure.

    Uses ranks of multiplication maps on binary forms: at degree ``D = r`` the
    rank increment equals the generic rank, and the column and row minimal
    index sums account for the whole rank iff the pencil has no regular part.
    """
    X, Y = _as_lists(X), _as_lists(Y)
    if r == 0:
        return not any(any(row) for row in X) and not any(any(row) for row in Y)
    D = r
    top = _mult_rank(X, Y, D, p)
    if top - _mult_rank(X, Y, D - 1, p) != r:
        return False
    eps = top - r * (D + 1)
    XT = [list(col) for col in zip(*X)]
    YT = [list(col) for col in zip(*Y)]
    eta = _mult_rank(XT, YT, D, p) - r * (D + 1)
    return eps + eta == r


def extend_scan(ambient, span, free, lead: int, p: int, r: int,
                start: int, stop: int, pencil: bool):
    """Scan canonical extension candidates of a partial space.

    Candidate ``idx`` is ``E[lead] + sum(y_j * E[free[j]])`` with digits
    ``y`` in ``[0, p)`` read big-endian.  It survives when every matrix
    ``W + sum(c_i * span[i])`` has rank ``r`` and, for a one-dimensional
    ``span`` with ``pencil`` set, the pencil it spans is constant over the
    closure.  Returns ``(survivor indices, candidates visited)``.
    """
    ambient = [_as_lists(E) for E in ambient]
    span = [_as_lists(S) for S in span]
    nf = len(free)
    d = len(span)
    W = [row[:] for row in ambient[lead]]
    digits = [0] * nf
    rem = start
    for i in range(nf - 1, -1, -1):
        digits[i] = rem % p
        rem //= p
    for i in range(nf):
        if digits[i]:
            _addmul(W, ambient[free[i]], digits[i], p)
    survivors = []
    for idx in range(start, stop):
        ok = True
        T = [row[:] for row in W]
        coeff = [0] * d
        while True:
            if _rank_rows([row[:] for row in T], p) != r:
                ok = False
                break
            k = d - 1
            while k >= 0 and coeff[k] == p - 1:
                coeff[k] = 0
                _addmul(T, span[k], 1, p)
                k -= 1
            if k < 0:
                break
            coeff[k] += 1
            _addmul(T, span[k], 1, p)
        if ok and pencil and d == 1:
            ok = pencil_closure_constant(span[0], W, p, r)
        if ok:
            survivors.append(idx)
        for i in range(nf - 1, -1, -1):
            _addmul(W, ambient[free[i]], 1, p)
            if digits[i] == p - 1:
                digits[i] = 0
            else:
                digits[i] += 1
                break
    return survivors, stop - start
