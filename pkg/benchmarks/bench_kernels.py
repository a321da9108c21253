"""Compare the compiled kernels against the pure-Python fallback.

    python3 benchmarks/bench_kernels.py [--repeat 3] [--json]
"""

from __future__ import annotations

import argparse
import json
import random
import sys
import timeit

import numpy as np

from crank import _pykernels, kernels
from crank.constructions import Ambient
from crank.field import GF


def _rand(rng, rows, cols, p):
    return [[rng.randrange(p) for _ in range(cols)] for _ in range(rows)]


def cases(seed: int):
    rng = random.Random(seed)
    p = 101
    M = _rand(rng, 12, 12, p)
    off, dirs = _rand(rng, 6, 6, 7), [_rand(rng, 6, 6, 7) for _ in range(3)]
    X, Y = _rand(rng, 5, 6, 5), _rand(rng, 5, 6, 5)
    E = [[list(r) for r in B.entries] for B in Ambient.parse("sym(3)").basis(GF(3))]
    free = list(range(1, 5))
    span = [E[5]]
    ext = kernels._ext
    a = lambda x: np.ascontiguousarray(np.asarray(x, dtype=np.int64))
    yield ("rank_mod 12x12 mod 101",
           lambda: _pykernels.rank_mod(M, p),
           (lambda: ext.rank_mod(a(M), p)) if ext else None)
    yield ("grid_scan 6x6, 3 dirs, base 7",
           lambda: _pykernels.grid_scan(off, dirs, 7, 7, 0, 6, 0, 343),
           (lambda: ext.grid_scan(a(off), a(dirs), 7, 7, 0, 6, 0, 343)) if ext else None)
    yield ("pencil_closure_constant 5x6 mod 5",
           lambda: _pykernels.pencil_closure_constant(X, Y, 5, 5),
           (lambda: ext.pencil_closure_constant(a(X), a(Y), 5, 5)) if ext else None)
    yield ("extend_scan sym(3) over F3, pencil",
           lambda: _pykernels.extend_scan(E, span, free, 0, 3, 2, 0, 81, True),
           (lambda: ext.extend_scan(a(E), a(span), a(free), 0, 3, 2, 0, 81, True)) if ext else None)


def best_of(fn, repeat: int) -> float:
    number = 1
    while timeit.timeit(fn, number=number) < 0.05:
        number *= 4
    return min(timeit.repeat(fn, number=number, repeat=repeat)) / number


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--json", action="store_true")
    args = ap.parse_args(argv)
    rows = []
    for name, py, cy in cases(args.seed):
        t_py = best_of(py, args.repeat)
        t_cy = best_of(cy, args.repeat) if cy else None
        if cy:
            assert py() == cy(), f"backends disagree on {name}"
        rows.append({"case": name, "python_s": t_py, "cython_s": t_cy,
                     "speedup": t_py / t_cy if t_cy else None})
    if args.json:
        json.dump({"backend": kernels.BACKEND, "results": rows}, sys.stdout, indent=2)
        print()
        return 0
    print(f"compiled backend: {'available' if kernels._ext else 'missing'}")
    print(f"{'case':38} {'python':>12} {'cython':>12} {'speedup':>8}")
    for r in rows:
        cy = f"{r['cython_s'] * 1e6:10.1f}us" if r["cython_s"] else "         n/a"
        sp = f"{r['speedup']:7.1f}x" if r["speedup"] else "     n/a"
        print(f"{r['case']:38} {r['python_s'] * 1e6:10.1f}us {cy} {sp}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
