"""Command-line entry point.

Exit codes: 0 success, 1 usage or input error, 2 the mathematics said no
(a certification failed, a rank dropped on a line, a Chern vector was not
integral, two quadric systems differ).

Every JSON artifact embeds a ``manifest`` block echoing the subcommand and
its result-determining parameters.  The worker count is left out because it
never changes a result; wall time is recorded only with ``--timing``.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from math import comb
from pathlib import Path

from crank import __version__
from crank._util import DEFAULT_BUDGET, BudgetExceeded
from crank.bundles import uniformity_sample
from crank.constructions import (Ambient, CertificationFailure, band_space, double, random_subspace, wedge_selfdual,
                                 wedge_space, westwick_space)
from crank.field import QQ, FieldSpec
from crank.invariants import (BoundQuery, NonIntegralChern, OddRankError, bounds_table, chern_boundary_l3,
                              codim_table, independent_relation_count, quadric_betti_numbers, quadric_euler,
                              selfdual_relations)
from crank.matspace import MatrixSpace, constant_rank_check
from crank.search import SearchConfig, max_constant_rank_dim, random_witness
from crank.varieties import QuadricSystem, as_quadric_system, pluecker_quadrics, segre_quadrics, span_equal

FAMILIES = ("band", "wedge", "wedge_selfdual", "westwick", "random")


class UsageError(Exception):
    pass


class MathsSaidNo(Exception):
    """Carries a result payload that still gets written before exiting with code 2."""

    def __init__(self, message: str, payload: dict | None = None, text: str | None = None):
        super().__init__(message)
        self.payload = payload
        self.text = text


# -- argument parsing -------------------------------------------------------------------

def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("global options")
    g.add_argument("--field", default=None, help="Q or an odd prime p (default depends on the subcommand)")
    g.add_argument("--seed", type=int, default=0, help="master seed for all randomness")
    g.add_argument("--workers", type=int, default=None, help="worker threads (default: available cores)")
    g.add_argument("--json", action="store_true", help="print JSON instead of a table")
    g.add_argument("--out", default=None, help="also write the JSON artifact to this file")
    g.add_argument("--budget", type=int, default=None, help="work budget (points, lines or search nodes)")
    g.add_argument("--timing", action="store_true", help="record wall time in the manifest")
    return p


def _kv(text: str) -> tuple[str, str]:
    if "=" not in text:
        raise argparse.ArgumentTypeError(f"expected key=value, got {text!r}")
    k, v = text.split("=", 1)
    return k.strip(), v.strip()


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(prog="crank", description="Exact constant-rank matrix spaces.")
    parser.add_argument("--version", action="version", version=f"crank {__version__}")
    sub = parser.add_subparsers(dest="command", metavar="command")
    sub.required = True

    p = sub.add_parser("construct", parents=[common], help="build a standard space")
    p.add_argument("family", choices=FAMILIES)
    p.add_argument("--params", nargs="*", type=_kv, default=[], metavar="KEY=VALUE",
                   help="band: r n; wedge: m k; wedge_selfdual: a; westwick: a; random: ambient dim")
    p.add_argument("--double", choices=("sym", "skew"), default=None, help="embed block anti-diagonally")
    p.add_argument("--no-certify", action="store_true", help="skip the constant-rank certificate")

    p = sub.add_parser("check", parents=[common], help="certify constant rank of a space file")
    p.add_argument("--input", required=True)
    p.add_argument("--rank", type=int, required=True)
    p.add_argument("--scope", choices=("rational", "closure"), default=None,
                   help="over F_q: F_q-points only or the algebraic closure")

    p = sub.add_parser("chern", parents=[common], help="Chern vectors and self-duality relations")
    mode = p.add_mutually_exclusive_group(required=True)
    mode.add_argument("--boundary-l3", action="store_true", help="c(K), c(E) at the boundary case l = 3")
    mode.add_argument("--relations", action="store_true", help="linear relations forced by self-duality")
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--l", type=int, default=3)

    p = sub.add_parser("split", parents=[common], help="kernel and image splitting types on lines")
    p.add_argument("--input", required=True)
    p.add_argument("--lines", type=int, default=20)
    p.add_argument("--rank", type=int, default=None)

    p = sub.add_parser("search", parents=[common], help="largest constant-rank subspace over F_q")
    p.add_argument("--ambient", choices=("hom", "sym", "skew"), required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--rank", type=int, required=True)
    p.add_argument("--mode", choices=("exhaustive", "randomized"), default="exhaustive")
    p.add_argument("--semantics", choices=("closure", "rational"), default="closure")
    p.add_argument("--target-dim", type=int, default=None, help="randomized mode: look for this dimension")

    p = sub.add_parser("ideal", parents=[common], help="Segre and Pluecker quadric systems")
    p.add_argument("action", choices=("segre", "pluecker", "compare"))
    p.add_argument("files", nargs="*", help="compare: two quadric-system or symmetric space files")

    p = sub.add_parser("bounds", parents=[common], help="dimension bounds for constant-rank spaces")
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--n", type=int, default=None)
    kind = p.add_mutually_exclusive_group()
    kind.add_argument("--sym", action="store_true")
    kind.add_argument("--skew", action="store_true")

    p = sub.add_parser("betti", parents=[common], help="Betti numbers of a smooth quadric")
    p.add_argument("--r", type=int, required=True)
    return parser


# -- helpers ----------------------------------------------------------------------------

def _field(args, default: FieldSpec | None = QQ) -> FieldSpec | None:
    if args.field is None:
        return default
    try:
        return FieldSpec.parse(args.field)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _load_json(path: str) -> dict:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path}: malformed JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from None


def _load_space(path: str) -> MatrixSpace:
    data = _load_json(path)
    try:
        return MatrixSpace.from_json(data)
    except (KeyError, TypeError, ValueError) as exc:
        raise UsageError(f"{path}: invalid matrix space: {exc}") from None


def _load_quadrics(path: str) -> QuadricSystem:
    data = _load_json(path)
    try:
        if "labels" in data:
            return QuadricSystem.from_json(data)
        return as_quadric_system(MatrixSpace.from_json(data))
    except (KeyError, TypeError, ValueError) as exc:
        raise UsageError(f"{path}: invalid quadric system: {exc}") from None


def _int_param(params: dict, key: str) -> int:
    if key not in params:
        raise UsageError(f"missing parameter {key}=...")
    try:
        return int(params[key])
    except (TypeError, ValueError):
        raise UsageError(f"parameter {key} must be an integer, got {params[key]!r}") from None


def _table(rows: list[list], header: list[str]) -> str:
    cells = [header] + [[str(c) for c in r] for r in rows]
    widths = [max(len(r[i]) for r in cells) for i in range(len(header))]
    lines = ["  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() for r in cells]
    lines.insert(1, "  ".join("-" * w for w in widths))
    return "\n".join(lines)


def _describe_space(A: MatrixSpace) -> str:
    cert = A.metadata.get("certificate")
    lines = [f"{A.k}-dimensional {A.symmetry} space of {A.m} x {A.n} matrices over {A.field}"]
    if A.metadata.get("family"):
        lines.append(f"family: {A.metadata['family']} {json.dumps(A.metadata.get('params', {}), sort_keys=True)}")
    if cert:
        lines.append(f"certificate: constant rank {cert['rank']}: {cert['constant']} "
                     f"({cert['status']}, {cert['mode']}, scope {cert['scope']})")
    return "\n".join(lines)


def _describe_certificate(c: dict) -> str:
    rows = [[k, json.dumps(c[k]) if isinstance(c[k], (dict, list)) else c[k]]
            for k in ("rank", "constant", "status", "mode", "scope", "generic_rank", "min_nonzero_rank",
                      "max_rank", "samples", "seed")]
    return _table(rows, ["field", "value"])


# -- subcommands ------------------------------------------------------------------------

def _construct(args) -> tuple[dict, str, dict]:
    F = _field(args)
    params = {k: int(v) if v.lstrip("-").isdigit() else v for k, v in args.params}
    fam = args.family
    if fam == "band":
        r, n = _int_param(params, "r"), _int_param(params, "n")
        A, rank = band_space(r, n, F, certify=False), r
    elif fam == "wedge":
        m, k = _int_param(params, "m"), _int_param(params, "k")
        A, rank = wedge_space(m, k, F), comb(m - 1, k)
    elif fam == "wedge_selfdual":
        a = _int_param(params, "a")
        A, rank = wedge_selfdual(a, F), comb(2 * a, a)
    elif fam == "westwick":
        a = _int_param(params, "a")
        A, rank = westwick_space(a, F, seed=args.seed), 2 * a
    else:
        if "ambient" not in params:
            raise UsageError("missing parameter ambient=...")
        A = random_subspace(F, Ambient.parse(params["ambient"]), _int_param(params, "dim"), seed=args.seed)
        rank = None
    if args.double:
        A = double(A, skew=args.double == "skew")
        rank = None if rank is None else 2 * rank
    md = {k: v for k, v in A.metadata.items() if k != "certificate"}
    md.update(family=fam if not args.double else f"double({fam})", params=params, seed=args.seed)
    statuses = {}
    if rank is not None and not args.no_certify:
        cert = constant_rank_check(A, rank, seed=args.seed, workers=args.workers,
                                   budget=args.budget or DEFAULT_BUDGET)
        md["certificate"] = cert.to_json()
        statuses["construction"] = cert.status if cert.constant else "failed"
        A = MatrixSpace(A.field, A.m, A.n, A.basis, A.symmetry, md)
        if not cert.constant:
            raise MathsSaidNo(f"{fam} failed constant-rank certification at rank {rank}",
                              (A.to_json(), statuses), _describe_space(A))
    else:
        A = MatrixSpace(A.field, A.m, A.n, A.basis, A.symmetry, md)
    return A.to_json(), _describe_space(A), statuses


def _check(args) -> tuple[dict, str, dict]:
    A = _load_space(args.input)
    F = _field(args, default=None)
    if F is not None and F != A.field:
        if not (A.field.is_rational and F.is_finite):
            raise UsageError(f"cannot move a space over {A.field} to {F}")
        try:
            A = A.reduce_mod(F.p)
        except (ValueError, ZeroDivisionError) as exc:
            raise UsageError(f"reduction mod {F.p} failed: {exc}") from None
    if args.scope == "rational" and A.field.is_rational:
        raise UsageError("--scope rational needs a finite field")
    cert = constant_rank_check(A, args.rank, seed=args.seed, workers=args.workers,
                               budget=args.budget or DEFAULT_BUDGET, scope=args.scope).to_json()
    statuses = {"check": cert["status"] if cert["constant"] else "failed"}
    text = _describe_certificate(cert)
    if not cert["constant"]:
        raise MathsSaidNo(f"not constant rank {args.rank}", (cert, statuses), text)
    return cert, text, statuses


def _chern(args) -> tuple[dict, str, dict]:
    if args.boundary_l3:
        try:
            cK, cE = chern_boundary_l3(args.r)
        except NonIntegralChern as exc:
            payload = {"r": args.r, "integral": False, "term": exc.term, "value": str(exc.value),
                       "failures": [str(f) for f in exc.failures]}
            raise MathsSaidNo(str(exc), (payload, {"chern": "non-integral"}), str(exc)) from None
        except OddRankError as exc:
            raise MathsSaidNo(str(exc), ({"r": args.r, "error": str(exc)}, {"chern": "odd-rank"}), str(exc)) from None
        payload = {"r": args.r, "integral": True, "c_K": cK.to_json(), "c_E": cE.to_json(),
                   "c_K_text": str(cK), "c_E_text": str(cE)}
        return payload, f"c(K) = {cK}\nc(E) = {cE}", {"chern": "integral"}
    try:
        rels = selfdual_relations(args.r, args.l)
    except OddRankError as exc:
        raise MathsSaidNo(str(exc), ({"r": args.r, "l": args.l, "error": str(exc)}, {"chern": "odd-rank"}),
                          str(exc)) from None
    payload = {"r": args.r, "l": args.l, "relations": [str(x) for x in rels],
               "independent": independent_relation_count(args.r, args.l)}
    text = "\n".join(str(x) for x in rels) + f"\nindependent relations: {payload['independent']}"
    return payload, text, {}


def _split(args) -> tuple[dict, str, dict]:
    A = _load_space(args.input)
    rep = uniformity_sample(A, args.lines, seed=args.seed, r=args.rank, workers=args.workers,
                            budget=args.budget or DEFAULT_BUDGET)
    payload = rep.to_json()
    payload["uniform"] = rep.uniform
    text = _table([[", ".join(str(t) for t in rep.kernel_types) or "-",
                    ", ".join(str(t) for t in rep.image_types) or "-", rep.lines_checked, len(rep.failures)]],
                  ["kernel", "image", "lines", "failures"])
    statuses = {"split": "uniform" if rep.uniform else ("rank-drop" if rep.failures else "non-uniform")}
    if rep.failures:
        raise MathsSaidNo(f"rank drops on {len(rep.failures)} line(s)", (payload, statuses), text)
    return payload, text, statuses


def _search(args) -> tuple[dict, str, dict]:
    F = _field(args, default=None)
    if F is None or not F.is_finite:
        raise UsageError("search needs --field <odd prime>")
    n = args.n if args.ambient == "hom" else args.m
    if n is None:
        raise UsageError("hom ambient needs --n")
    amb = Ambient(args.ambient, args.m, n)
    try:
        cfg = SearchConfig(F, amb, args.rank, mode=args.mode, seed=args.seed, workers=args.workers,
                           semantics=args.semantics, **({"budget": args.budget} if args.budget else {}))
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if args.mode == "randomized" and args.target_dim is not None:
        W = random_witness(cfg, args.target_dim)
        payload = {"field": F.to_json(), "ambient": str(amb), "rank": args.rank, "mode": "randomized",
                   "semantics": args.semantics, "target_dim": args.target_dim, "found": W is not None,
                   "witness": W.to_json() if W is not None else None}
        text = f"target dimension {args.target_dim}: " + ("found\n" + _describe_space(W) if W else "nothing found")
        return payload, text, {"search": "found" if W else "not-found"}
    res = max_constant_rank_dim(cfg)
    payload = res.to_json()
    text = _table([[str(amb), args.rank, str(F), args.semantics, res.max_dim_found, res.exhausted,
                    res.nodes_visited]], ["ambient", "rank", "field", "semantics", "max_dim", "exhausted", "nodes"])
    if res.notes:
        text += "\n" + "\n".join(res.notes)
    if args.timing:
        payload["wall_time"] = round(res.wall_time, 3)
    return payload, text, {"search": "exhausted" if res.exhausted else "partial"}


def _ideal(args) -> tuple[dict, str, dict]:
    F = _field(args)
    if args.action in ("segre", "pluecker"):
        if args.files:
            raise UsageError(f"ideal {args.action} takes no files")
        Q = segre_quadrics(F) if args.action == "segre" else pluecker_quadrics(F)
        text = f"{args.action}: {Q.dim} quadrics in {Q.nvars} coordinates ({', '.join(Q.labels)})"
        return Q.to_json(), text, {}
    if len(args.files) != 2:
        raise UsageError("ideal compare needs exactly two files")
    Q1, Q2 = (_load_quadrics(f) for f in args.files)
    try:
        eq = span_equal(Q1, Q2)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    payload = {"files": [Path(f).name for f in args.files], "span_equal": eq, "dims": [Q1.dim, Q2.dim]}
    text = f"span_equal = {str(eq).lower()} (dimensions {Q1.dim} and {Q2.dim})"
    if not eq:
        raise MathsSaidNo("spans differ", (payload, {"ideal": "different"}), text)
    return payload, text, {"ideal": "equal"}


def _bounds(args) -> tuple[dict, str, dict]:
    sym = "symmetric" if args.sym else "skew" if args.skew else "general"
    try:
        q = BoundQuery(args.r, args.m, args.n if sym == "general" else None, sym)
        codims = codim_table(args.r, args.m, q.n)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    entries = bounds_table(q)
    payload = {"r": q.r, "m": q.m, "n": q.n, "symmetry": sym, "entries": [e.to_json() for e in entries],
               "codimensions": {"general": codims.general, "symmetric": codims.symmetric, "skew": codims.skew}}
    rows = [[e.quantity.split("(")[0], e.quantity[e.quantity.index("("):], e.value, e.status, e.reason,
             e.condition or ""] for e in entries]
    text = _table(rows, ["quantity", "args", "value", "status", "reason", "condition"])
    text += (f"\ncodim X_{q.r}: general {codims.general}, symmetric {codims.symmetric}, "
             f"skew {codims.skew if codims.skew is not None else '-'}")
    summary = [f"{e.quantity.split('(')[0]} = {e.value}  ({e.status}: {e.reason})" for e in entries]
    return payload, text + "\n" + "\n".join(summary), {}


def _betti(args) -> tuple[dict, str, dict]:
    try:
        b = quadric_betti_numbers(args.r)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    e = quadric_euler(args.r)
    payload = {"r": args.r, "betti": b, "euler": e}
    text = _table([[i, x] for i, x in enumerate(b)], ["i", "b_i"]) + f"\neuler characteristic = {e}"
    return payload, text, {}


HANDLERS = {"construct": _construct, "check": _check, "chern": _chern, "split": _split, "search": _search,
            "ideal": _ideal, "bounds": _bounds, "betti": _betti}

# Options that never change a result and so stay out of the manifest.
NON_RESULT_OPTIONS = {"workers", "json", "out", "timing", "command"}


def manifest(args, statuses: dict, wall: float | None) -> dict:
    params = {k: v for k, v in sorted(vars(args).items()) if k not in NON_RESULT_OPTIONS}
    params = json.loads(json.dumps(params, default=str))
    out = {"subcommand": args.command, "params": params, "seed": args.seed, "version": __version__,
           "field": args.field, "certificate_statuses": statuses}
    if wall is not None:
        out["wall_time"] = round(wall, 3)
    return out


def _emit(args, payload: dict, text: str, statuses: dict, t0: float) -> None:
    doc = dict(payload)
    doc["manifest"] = manifest(args, statuses, time.perf_counter() - t0 if args.timing else None)
    blob = json.dumps(doc, indent=2, sort_keys=True) + "\n"
    if args.out:
        Path(args.out).write_text(blob)
    sys.stdout.write(blob if args.json else text + "\n")


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 1
    t0 = time.perf_counter()
    try:
        payload, text, statuses = HANDLERS[args.command](args)
    except UsageError as exc:
        print(f"crank {args.command}: error: {exc}", file=sys.stderr)
        return 1
    except BudgetExceeded as exc:
        print(f"crank {args.command}: budget exceeded: {exc}", file=sys.stderr)
        return 1
    except (MathsSaidNo, CertificationFailure) as exc:
        if isinstance(exc, MathsSaidNo) and exc.payload is not None:
            payload, statuses = exc.payload
            _emit(args, payload, exc.text or str(exc), statuses, t0)
        print(f"crank {args.command}: {exc}", file=sys.stderr)
        return 2
    _emit(args, payload, text, statuses, t0)
    return 0


if __name__ == "__main__":
    sys.exit(main())
