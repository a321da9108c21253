"""Backend selection for the modular rank kernels.

The compiled extension is used when it was built and the modulus fits in
31 bits; otherwise the pure-Python twin runs.  Set ``CRANK_PURE_PYTHON=1`` to
force the fallback (the test-suite runs both).
"""

from __future__ import annotations

import os

import numpy as np

from crank import _pykernels

try:
    if os.environ.get("CRANK_PURE_PYTHON", "") not in ("", "0"):
        raise ImportError("pure-Python kernels requested")
    from crank import _kernels as _ext
except ImportError:
    _ext = None

BACKEND = "cython" if _ext is not None else "python"
MAX_NATIVE_MODULUS = 2**31


def _native(p: int) -> bool:
    return _ext is not None and p < MAX_NATIVE_MODULUS


def _arr(M, p: int, ndim: int) -> np.ndarray:
    a = np.asarray(M, dtype=np.int64)
    if a.ndim != ndim:
        a = a.reshape((0,) * ndim) if a.size == 0 else a
    return np.ascontiguousarray(a % p)


def rank_mod(M, p: int) -> int:
    if _native(p):
        return _ext.rank_mod(_arr(M, p, 2), p)
    return _pykernels.rank_mod(M, p)


def grid_scan(offset, dirs, p: int, base: int, lo: int, hi: int, start: int, stop: int):
    if _native(p):
        off = _arr(offset, p, 2)
        dd = _arr(dirs, p, 3) if len(dirs) else np.zeros((0,) + off.shape, dtype=np.int64)
        return _ext.grid_scan(off, dd, p, base, lo, hi, start, stop)
    return _pykernels.grid_scan(offset, dirs, p, base, lo, hi, start, stop)


def pencil_closure_constant(X, Y, p: int, r: int) -> bool:
    if _native(p):
        return _ext.pencil_closure_constant(_arr(X, p, 2), _arr(Y, p, 2), p, r)
    return _pykernels.pencil_closure_constant(X, Y, p, r)


def extend_scan(ambient, span, free, lead: int, p: int, r: int,
                start: int, stop: int, pencil: bool):
    if _native(p):
        amb = _arr(ambient, p, 3)
        sp = _arr(span, p, 3) if len(span) else np.zeros((0,) + amb.shape[1:], dtype=np.int64)
        fr = np.ascontiguousarray(np.asarray(free, dtype=np.int64))
        return _ext.extend_scan(amb, sp, fr, lead, p, r, start, stop, pencil)
    return _pykernels.extend_scan(ambient, span, list(free), lead, p, r, start, stop, pencil)
