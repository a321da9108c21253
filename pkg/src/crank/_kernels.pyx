# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled modular rank kernels.

Same contracts as :mod:`crank._pykernels`; the heavy loops run without the
GIL so thread pools scale.  Moduli must stay below 2**31 so that products of
residues fit in a signed 64-bit integer.
"""

from libc.stdlib cimport malloc, realloc, free
from libc.string cimport memcpy

ctypedef long long i64


cdef inline i64 _modinv(i64 a, i64 p) noexcept nogil:
    cdef i64 t = 0, nt = 1, r = p, nr = a, q, tmp
    while nr != 0:
        q = r // nr
        tmp = t - q * nt
        t = nt
        nt = tmp
        tmp = r - q * nr
        r = nr
        nr = tmp
    if t < 0:
        t += p
    return t


cdef int _rank(i64* a, int rows, int cols, i64 p) noexcept nogil:
    """In-place elimination; ``a`` is row-major with entries in [0, p)."""
    cdef int r = 0, c, i, j, piv
    cdef i64 inv, f, x, tmp
    cdef i64* prow
    cdef i64* irow
    for c in range(cols):
        if r == rows:
            break
        piv = -1
        for i in range(r, rows):
            if a[i * cols + c] != 0:
                piv = i
                break
        if piv < 0:
            continue
        if piv != r:
            for j in range(c, cols):
                tmp = a[piv * cols + j]
                a[piv * cols + j] = a[r * cols + j]
                a[r * cols + j] = tmp
        prow = a + r * cols
        inv = _modinv(prow[c], p)
        if inv != 1:
            for j in range(c, cols):
                prow[j] = prow[j] * inv % p
        for i in range(r + 1, rows):
            irow = a + i * cols
            f = irow[c]
            if f != 0:
                for j in range(c, cols):
                    x = (irow[j] - f * prow[j]) % p
                    if x < 0:
                        x += p
                    irow[j] = x
        r += 1
    return r


cdef inline void _addmul(i64* t, const i64* d, i64 k, int n, i64 p) noexcept nogil:
    cdef int j
    cdef i64 x
    for j in range(n):
        x = (t[j] + k * d[j]) % p
        if x < 0:
            x += p
        t[j] = x


def rank_mod(const i64[:, ::1] M, i64 p):
    cdef int rows = M.shape[0], cols = M.shape[1], r
    if rows == 0 or cols == 0:
        return 0
    cdef i64* a = <i64*> malloc(rows * cols * sizeof(i64))
    if a == NULL:
        raise MemoryError()
    memcpy(a, &M[0, 0], rows * cols * sizeof(i64))
    with nogil:
        r = _rank(a, rows, cols, p)
    free(a)
    return r


def grid_scan(const i64[:, ::1] offset, const i64[:, :, ::1] dirs, i64 p, i64 base,
              int lo, int hi, i64 start, i64 stop):
    cdef int R = offset.shape[0], C = offset.shape[1], n = R * C
    cdef int d = dirs.shape[0], i, rk
    cdef int lo_seen = 1 << 30, hi_seen = -1
    cdef i64 idx, rem, bad = -1
    cdef i64* T = <i64*> malloc(max(n, 1) * sizeof(i64))
    cdef i64* work = <i64*> malloc(max(n, 1) * sizeof(i64))
    cdef i64* digits = <i64*> malloc(max(d, 1) * sizeof(i64))
    cdef const i64* D0 = &dirs[0, 0, 0] if d > 0 else NULL
    if T == NULL or work == NULL or digits == NULL:
        free(T); free(work); free(digits)
        raise MemoryError()
    with nogil:
        memcpy(T, &offset[0, 0], n * sizeof(i64))
        rem = start
        for i in range(d - 1, -1, -1):
            digits[i] = rem % base
            rem = rem // base
        for i in range(d):
            if digits[i] != 0:
                _addmul(T, D0 + i * n, digits[i], n, p)
        idx = start
        while idx < stop:
            memcpy(work, T, n * sizeof(i64))
            rk = _rank(work, R, C, p)
            if rk < lo_seen:
                lo_seen = rk
            if rk > hi_seen:
                hi_seen = rk
            if rk < lo or rk > hi:
                bad = idx
                break
            for i in range(d - 1, -1, -1):
                if digits[i] == base - 1:
                    digits[i] = 0
                    _addmul(T, D0 + i * n, -(base - 1), n, p)
                else:
                    digits[i] += 1
                    _addmul(T, D0 + i * n, 1, n, p)
                    break
            idx += 1
    free(T); free(work); free(digits)
    return lo_seen, hi_seen, bad


cdef int _mult_rank(const i64* X, const i64* Y, int R, int C, int d, i64 p, bint transpose) noexcept nogil:
    # Pencil shape is R x C (already transposed by the caller's view if requested).
    cdef int rows = R * (d + 2), cols = C * (d + 1), a, i, j, rk
    cdef i64* M = <i64*> malloc(rows * cols * sizeof(i64))
    cdef i64 x, y
    if M == NULL:
        return -1
    for i in range(rows * cols):
        M[i] = 0
    for a in range(d + 1):
        for i in range(R):
            for j in range(C):
                if transpose:
                    x = X[j * R + i]
                    y = Y[j * R + i]
                else:
                    x = X[i * C + j]
                    y = Y[i * C + j]
                M[(a * R + i) * cols + a * C + j] = x
                M[((a + 1) * R + i) * cols + a * C + j] = y
    rk = _rank(M, rows, cols, p)
    free(M)
    return rk


cdef bint _pencil_ok(const i64* X, const i64* Y, int R, int C, i64 p, int r) noexcept nogil:
    cdef int D = r, top, eps, eta, i
    if r == 0:
        for i in range(R * C):
            if X[i] != 0 or Y[i] != 0:
                return False
        return True
    top = _mult_rank(X, Y, R, C, D, p, False)
    if top - _mult_rank(X, Y, R, C, D - 1, p, False) != r:
        return False
    eps = top - r * (D + 1)
    eta = _mult_rank(X, Y, C, R, D, p, True) - r * (D + 1)
    return eps + eta == r


def pencil_closure_constant(const i64[:, ::1] X, const i64[:, ::1] Y, i64 p, int r):
    cdef int R = X.shape[0], C = X.shape[1]
    cdef bint ok
    with nogil:
        ok = _pencil_ok(&X[0, 0], &Y[0, 0], R, C, p, r)
    return bool(ok)


def extend_scan(const i64[:, :, ::1] ambient, const i64[:, :, ::1] span, const i64[::1] free_pos,
                int lead, i64 p, int r, i64 start, i64 stop, bint pencil):
    cdef int R = ambient.shape[1], C = ambient.shape[2], n = R * C
    cdef int d = span.shape[0], nf = free_pos.shape[0], i, k
    cdef i64 idx, rem
    cdef bint ok
    cdef const i64* A0 = &ambient[0, 0, 0]
    cdef const i64* S0 = &span[0, 0, 0] if d > 0 else NULL
    cdef const i64* F = &free_pos[0] if nf > 0 else NULL
    cdef i64* W = <i64*> malloc(n * sizeof(i64))
    cdef i64* T = <i64*> malloc(n * sizeof(i64))
    cdef i64* work = <i64*> malloc(n * sizeof(i64))
    cdef i64* digits = <i64*> malloc(max(nf, 1) * sizeof(i64))
    cdef i64* coeff = <i64*> malloc(max(d, 1) * sizeof(i64))
    cdef i64 cap = 64, count = 0
    cdef i64* out = <i64*> malloc(cap * sizeof(i64))
    cdef i64* grown
    cdef bint oom = False
    if W == NULL or T == NULL or work == NULL or digits == NULL or coeff == NULL or out == NULL:
        free(W); free(T); free(work); free(digits); free(coeff); free(out)
        raise MemoryError()
    with nogil:
        memcpy(W, A0 + lead * n, n * sizeof(i64))
        rem = start
        for i in range(nf - 1, -1, -1):
            digits[i] = rem % p
            rem = rem // p
        for i in range(nf):
            if digits[i] != 0:
                _addmul(W, A0 + F[i] * n, digits[i], n, p)
        idx = start
        while idx < stop:
            ok = True
            memcpy(T, W, n * sizeof(i64))
            for i in range(d):
                coeff[i] = 0
            while True:
                memcpy(work, T, n * sizeof(i64))
                if _rank(work, R, C, p) != r:
                    ok = False
                    break
                k = d - 1
                while k >= 0 and coeff[k] == p - 1:
                    coeff[k] = 0
                    _addmul(T, S0 + k * n, 1, n, p)
                    k -= 1
                if k < 0:
                    break
                coeff[k] += 1
                _addmul(T, S0 + k * n, 1, n, p)
            if ok and pencil and d == 1:
                ok = _pencil_ok(S0, W, R, C, p, r)
            if ok:
                if count == cap:
                    cap *= 2
                    grown = <i64*> realloc(out, cap * sizeof(i64))
                    if grown == NULL:
                        oom = True
                        break
                    out = grown
                out[count] = idx
                count += 1
            for i in range(nf - 1, -1, -1):
                _addmul(W, A0 + F[i] * n, 1, n, p)
                if digits[i] == p - 1:
                    digits[i] = 0
                else:
                    digits[i] += 1
                    break
            idx += 1
    result = [out[i] for i in range(count)]
    free(W); free(T); free(work); free(digits); free(coeff); free(out)
    if oom:
        raise MemoryError()
    return result, stop - start
