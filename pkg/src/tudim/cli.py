"""Command-line front end.

Exit codes: 0 success / property holds, 1 property fails, 2 bad input,
3 budget exhausted, 4 internal assertion.
"""

from __future__ import annotations

import argparse
import os
import sys
from fractions import Fraction
from typing import Optional, Sequence

from . import decomp, families, formats, reform
from .errors import BudgetExceeded, InputError, InternalAssertion
from .exactmat import Matrix, format_entry, format_matrix, parse_matrix
from .polytope import DEFAULT_LIMIT, idp_check
from .tu import is_almost_tu, is_tu, is_unimodular, pivot, tu_kernel

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_BUDGET, EXIT_INTERNAL = 0, 1, 2, 3, 4


class Done(Exception):
    def __init__(self, code):
        self.code = code


# ---------------------------------------------------------------------
# I/O helpers
# ---------------------------------------------------------------------

def _read(path: Optional[str]) -> str:
    if path in (None, "-"):
        return sys.stdin.read()
    try:
        with open(path) as fh:
            return fh.read()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from exc


def _matrix(path) -> Matrix:
    text = _read(path)
    if text.lstrip().startswith("{"):
        obj = formats._load(text, "input")
        if "A" not in obj:
            raise InputError("JSON input has no 'A' matrix")
        return formats.matrix_from_json(obj["A"], "A")
    return parse_matrix(text)


def _ints(tokens: Sequence[str], name: str) -> tuple:
    out = []
    for t in tokens:
        for part in t.replace(",", " ").split():
            try:
                out.append(int(part))
            except ValueError as exc:
                raise InputError(f"{name}: {part!r} is not an integer") from exc
    return tuple(out)


def _nums(tokens: Sequence[str], name: str) -> tuple:
    out = []
    for t in tokens:
        for part in t.replace(",", " ").split():
            try:
                out.append(Fraction(part))
            except (ValueError, ZeroDivisionError) as exc:
                raise InputError(f"{name}: {part!r} is not a number") from exc
    return tuple(int(x) if x.denominator == 1 else x for x in out)


class _Out:
    def __init__(self, args):
        self.args = args
        self.chunks = []

    def text(self, s: str):
        self.chunks.append(s if s.endswith("\n") else s + "\n")

    def emit(self, text: str, obj):
        if self.args.format == "json":
            self.chunks.append(formats.dumps(obj))
        else:
            self.text(text)

    def flush(self):
        data = "".join(self.chunks)
        if self.args.out:
            with open(self.args.out, "w") as fh:
                fh.write(data)
        else:
            sys.stdout.write(data)


def _write_file(path, data):
    try:
        with open(path, "w") as fh:
            fh.write(data)
    except OSError as exc:
        raise InputError(f"cannot write {path}: {exc.strerror}") from exc


def _violation_text(v) -> str:
    rows, cols, d = v
    fmt = lambda s: "{" + ",".join(str(i + 1) for i in s) + "}"  # noqa: E731
    return f"violation: rows {fmt(rows)} cols {fmt(cols)} det {d}"


def _violation_json(v) -> dict:
    rows, cols, d = v
    return {"rows": [i + 1 for i in rows], "cols": [j + 1 for j in cols], "det": str(d)}


# ---------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------

def cmd_check_tu(args, out):
    M = _matrix(args.input)
    v = is_tu(M, args.method)
    if v:
        out.emit("TU", {"tu": True})
        return EXIT_OK
    out.emit("not TU\n" + _violation_text(v.violation), {"tu": False, "violation": _violation_json(v.violation)})
    return EXIT_FAIL


def cmd_unimodular(args, out):
    ok = is_unimodular(_matrix(args.input))
    out.emit("unimodular" if ok else "not unimodular", {"unimodular": ok})
    return EXIT_OK if ok else EXIT_FAIL


def cmd_almost_tu(args, out):
    ok = is_almost_tu(_matrix(args.input))
    out.emit("almost TU" if ok else "not almost TU", {"almost_tu": ok})
    return EXIT_OK if ok else EXIT_FAIL


def cmd_tu_kernel(args, out):
    W = tu_kernel(_matrix(args.input))
    out.emit(format_matrix(W), {"W": formats.matrix_to_json(W)})
    return EXIT_OK


def cmd_pivot(args, out):
    R = pivot(_matrix(args.input), args.p, args.q)
    out.emit(format_matrix(R), {"result": formats.matrix_to_json(R)})
    return EXIT_OK


def _emit_cert(args, out, A, D, generator=None):
    cert = formats.certificate_to_json(A, D, generator=generator)
    if getattr(args, "cert", None):
        _write_file(args.cert, formats.dumps(cert))
    return cert


def cmd_dim(args, out):
    A = _matrix(args.input)
    if args.tu:
        rep = decomp.tu_dimension(A, args.limit)
    else:
        rep = decomp.affine_tu_dimension(A, args.limit)
    label = "affine TU-dimension" if rep.kind == "affine" else "TU-dimension"
    lines = [f"{label}: {rep.describe()}"]
    b = rep.bounds
    # the rank bound only constrains A = U W, not A = A_tilde + U W
    if rep.kind == "tu":
        bounds = {"rank": b.rank_bound, "heller_tu": b.heller_tu}
    else:
        bounds = {"heller_affine": b.heller_affine}
    lines.append("lower bounds: " + ", ".join(f"{k.replace('_', '-')} {v}" for k, v in bounds.items()))
    for k in sorted(rep.searched):
        lines.append(f"k = {k}: {rep.searched[k]}")
    obj = {
        "kind": rep.kind,
        "value": rep.value,
        "exact": rep.exact,
        "searched": {str(k): s for k, s in sorted(rep.searched.items())},
        "lower_bounds": bounds,
    }
    if rep.certificate is not None:
        obj["certificate"] = _emit_cert(args, out, A, rep.certificate, f"dim --{rep.kind}")
        if args.cert:
            lines.append(f"certificate written to {args.cert}")
    out.emit("\n".join(lines), obj)
    return EXIT_OK if rep.exact else EXIT_BUDGET


def cmd_decide(args, out):
    A = _matrix(args.input)
    W = _matrix(args.given_w)
    if args.tu:
        D = decomp.decide_tu_given_w(A, W)
    else:
        D = decomp.decide_affine_given_w(A, W)
    if D is None:
        out.emit("no decomposition with this W", {"found": False})
        return EXIT_FAIL
    cert = _emit_cert(args, out, A, D, "decide --given-w")
    out.text(formats.dumps(cert))
    return EXIT_OK


def cmd_verify_cert(args, out):
    A, D, obj = formats.certificate_from_json(_read(args.input))
    chk = decomp.verify_affine(A, D) if obj["kind"] == "affine" else decomp.verify_tu(A, D)
    out.emit("valid" if chk else f"invalid: {chk.reason}", {"valid": chk.ok, "reason": chk.reason})
    return EXIT_OK if chk else EXIT_FAIL


def _model(args):
    text = _read(args.input)
    if text.lstrip().startswith("{"):
        M = formats.model_from_json(text)
        if args.w:
            M = reform.MixedIntegerModel(M.P, _matrix(args.w))
        return M
    if not args.w:
        raise InputError("a text instance needs --w")
    return reform.MixedIntegerModel(formats.parse_instance(text), _matrix(args.w))


def cmd_verify_wprop(args, out):
    M = _model(args)
    try:
        v = reform.verify_wprop(M.P, M.W, args.limit)
    except BudgetExceeded as exc:
        prog = {k: str(x) for k, x in sorted(exc.progress.items())}
        out.emit(f"indeterminate: {exc}", {"holds": None, "progress": prog})
        return EXIT_BUDGET
    if v:
        out.emit(f"property holds ({v.slices} slices)", formats.verdict_to_json(v))
        return EXIT_OK
    d, x = v.witness
    text = "property fails\nslice d = ({})\nvertex v = ({})".format(
        ", ".join(format_entry(t) for t in d), ", ".join(format_entry(t) for t in x)
    )
    out.emit(text, formats.verdict_to_json(v))
    return EXIT_FAIL


def cmd_reform_knapsack(args, out):
    a = _ints(args.a, "a")
    r = reform.knapsack_reform_nminus2(a, args.b, args.limit)
    obj = {
        "W": formats.matrix_to_json(r.W),
        "degenerate": r.degenerate,
        "verified": r.verdict.holds,
        "model": formats.model_to_json(reform.MixedIntegerModel(r.P, r.W)),
    }
    lines = [f"W ({r.W.rows} rows):", format_matrix(r.W).rstrip("\n")]
    if r.degenerate:
        lines.append("degenerate knapsack: " + r.notes["empty_side"] + " is empty, no integrality constraints needed")
    else:
        s = r.separation
        obj["separation"] = {
            "h": formats.vector_to_json(s.h),
            "alpha1": format_entry(s.alpha1),
            "alpha2": format_entry(s.alpha2),
            "majority_side": s.majority_side,
            "tight_p": len(s.tight_p),
            "tight_q": len(s.tight_q),
        }
        obj["face_points"] = [formats.vector_to_json(x) for x in r.face_points]
        lines.append(
            "separator h = ({}), alpha1 = {}, alpha2 = {}, tight {} + {}".format(
                ", ".join(format_entry(x) for x in s.h), format_entry(s.alpha1),
                format_entry(s.alpha2), len(s.tight_p), len(s.tight_q),
            )
        )
    lines.append("W-property verified")
    out.emit("\n".join(lines), obj)
    return EXIT_OK


def cmd_idp(args, out):
    text = _read(args.input)
    if text.lstrip().startswith("{"):
        P = formats.polyhedron_from_json(formats._load(text, "instance"))
    else:
        P = formats.parse_instance(text)
    r = idp_check(P, args.k, args.limit)
    if r:
        out.emit(f"IDP holds for k = {args.k}", {"holds": True, "k": args.k})
        return EXIT_OK
    w = formats.vector_to_json(r.witness)
    out.emit(f"IDP fails for k = {args.k}\nwitness ({', '.join(w)})", {"holds": False, "k": args.k, "witness": w})
    return EXIT_FAIL


def cmd_hnf_transform(args, out):
    W = _matrix(args.input)
    A = _matrix(args.a) if args.a else Matrix.zeros(0, W.cols)
    c = _nums(args.c, "c") if args.c else (0,) * W.cols
    L, AL, cL = decomp.change_of_variables(W, A, c)
    text = "L:\n" + format_matrix(L) + "W L:\n" + format_matrix(W @ L)
    obj = {"L": formats.matrix_to_json(L), "WL": formats.matrix_to_json(W @ L)}
    if args.a:
        text += "A L:\n" + format_matrix(AL)
        obj["AL"] = formats.matrix_to_json(AL)
    if args.c:
        text += "c L: " + " ".join(format_entry(x) for x in cL) + "\n"
        obj["cL"] = formats.vector_to_json(cL)
    out.emit(text, obj)
    return EXIT_OK


def cmd_gen(args, out):
    fam = args.family
    if fam == "parity":
        M, D = families.gen_parity(args.n)
        A = M.P.A
        cert = formats.certificate_to_json(A, D, generator=f"parity {args.n}")
        out.text(formats.dumps(formats.model_to_json(M, certificate=cert)))
    elif fam == "master":
        a, tu, aff = families.gen_master(args.n)
        A = Matrix([a])
        D = aff if args.affine else tu
        out.text(formats.dumps(formats.certificate_to_json(A, D, generator=f"master {args.n}")))
    elif fam == "powers":
        out.text(format_matrix(Matrix([families.gen_powers(args.n)])))
    elif fam == "lowerbound":
        P = families.gen_lower_bound_instance(args.n)
        W = Matrix.identity(P.n)
        out.text(formats.dumps(formats.model_to_json(reform.MixedIntegerModel(P, W))))
    elif fam == "bigsmall":
        inst = families.BigSmallInstance(_nums(args.small, "small"), _nums(args.big, "big"), args.k, _nums([args.b], "b")[0])
        facets, M = families.gen_big_small(inst)
        fj = [{"coeffs": formats.vector_to_json(f.coeffs), "rhs": format_entry(f.rhs), "label": f.label} for f in facets]
        out.text(formats.dumps(formats.model_to_json(M, facets=fj)))
    elif fam == "block":
        # r copies of a one-arc flow block whose two arc variables are shared
        block = (Matrix([[1, -1]]), Matrix.identity(2))
        A, D = families.block_compose([block] * args.n, [Matrix.identity(2)] * args.n)
        out.text(formats.dumps(formats.certificate_to_json(A, D, generator=f"block {args.n}")))
    return EXIT_OK


def cmd_ess(args, out):
    b = _ints(args.b, "b")
    if args.action == "encode":
        out.text(format_matrix(Matrix([reform.ess_encode(b)])))
        return EXIT_OK
    if args.action == "to-cert":
        if not args.r:
            raise InputError("ess to-cert needs --r")
        D = reform.ess_solution_to_decomp(b, _ints(args.r, "r"))
        A = Matrix([reform.ess_encode(b)])
        out.text(formats.dumps(formats.certificate_to_json(A, D, generator="ess to-cert")))
        return EXIT_OK
    A, D, obj = formats.certificate_from_json(_read(args.input))
    if obj["kind"] != "affine":
        raise InputError("ess from-cert needs an affine certificate")
    r = reform.ess_decomp_to_solution(b, D)
    out.emit("r = (" + ", ".join(str(x) for x in r) + ")", {"r": formats.vector_to_json(r)})
    return EXIT_OK


# ---------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------

def _default_limit() -> int:
    env = os.environ.get("TUDIM_LIMIT")
    if env is None:
        return DEFAULT_LIMIT
    try:
        return _positive(env)
    except argparse.ArgumentTypeError as exc:
        raise InputError(f"TUDIM_LIMIT: {exc}") from exc


def _positive(s) -> int:
    try:
        v = int(s)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{s!r} is not an integer") from None
    if v <= 0:
        raise argparse.ArgumentTypeError("must be positive")
    return v


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise Done(EXIT_INPUT)


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--format", choices=("text", "json"), default="text")
    common.add_argument("--limit", type=_positive, default=None, help="enumeration budget (default: $TUDIM_LIMIT or 10^7)")
    common.add_argument("--out", help="write the result here instead of stdout")

    p = _Parser(prog="tudim", description="Affine TU decompositions and mixed-integer reformulations.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, func, help_, input_=True):
        sp = sub.add_parser(name, parents=[common], help=help_)
        if input_:
            sp.add_argument("input", nargs="?", default="-", help="input file (default: stdin)")
        sp.set_defaults(func=func)
        return sp

    sp = add("check-tu", cmd_check_tu, "test total unimodularity")
    sp.add_argument("--method", choices=("minor", "gh", "ghouila-houri", "cross"), default="minor")
    add("unimodular", cmd_unimodular, "test unimodularity")
    add("almost-tu", cmd_almost_tu, "test almost total unimodularity")
    add("tu-kernel", cmd_tu_kernel, "TU matrix spanning the kernel")
    sp = add("pivot", cmd_pivot, "pivot on the bottom-left block")
    sp.add_argument("-p", type=int, required=True, help="number of top rows")
    sp.add_argument("-q", type=int, required=True, help="number of left columns")
    sp = add("dim", cmd_dim, "compute the (affine) TU-dimension")
    g = sp.add_mutually_exclusive_group()
    g.add_argument("--affine", action="store_true", default=True)
    g.add_argument("--tu", action="store_true")
    sp.add_argument("--cert", help="also write the certificate JSON here")
    sp = add("decide", cmd_decide, "decompose A for a given W")
    sp.add_argument("--given-w", required=True, help="file holding W")
    sp.add_argument("--tu", action="store_true", help="homogeneous decomposition A = U W")
    sp.add_argument("--cert", help="also write the certificate JSON here")
    add("verify-cert", cmd_verify_cert, "check a certificate file")
    sp = add("verify-wprop", cmd_verify_wprop, "check the W-property for a model")
    sp.add_argument("--w", help="W matrix file (required for text instances)")
    sp = add("reform-knapsack", cmd_reform_knapsack, "n - 2 integrality constraints for a 0-1 knapsack", input_=False)
    sp.add_argument("a", nargs="+", help="weights")
    sp.add_argument("--b", type=int, required=True, help="capacity")
    sp = add("idp", cmd_idp, "integer decomposition property check")
    sp.add_argument("--k", type=int, default=2)
    sp = add("hnf-transform", cmd_hnf_transform, "unimodular change of variables for a unimodular W")
    sp.add_argument("--a", help="constraint matrix file to transform")
    sp.add_argument("--c", nargs="+", help="objective to transform")

    sp = sub.add_parser("gen", parents=[common], help="generate an example family")
    sp.set_defaults(func=cmd_gen)
    fams = sp.add_subparsers(dest="family", required=True, parser_class=_Parser)
    for name, what in (("parity", "n"), ("master", "n"), ("powers", "n"), ("lowerbound", "m"), ("block", "number of blocks")):
        f = fams.add_parser(name, parents=[common])
        f.add_argument("n", type=_positive, help=what)
        if name == "master":
            f.add_argument("--affine", action="store_true", help="emit the affine certificate")
    f = fams.add_parser("bigsmall", parents=[common])
    f.add_argument("--k", type=int, required=True)
    f.add_argument("--b", required=True)
    f.add_argument("--small", nargs="+", required=True)
    f.add_argument("--big", nargs="*", default=[])

    sp = sub.add_parser("ess", parents=[common], help="equal-sum-subsets reduction")
    sp.set_defaults(func=cmd_ess)
    sp.add_argument("action", choices=("encode", "to-cert", "from-cert"))
    sp.add_argument("--b", nargs="+", required=True)
    sp.add_argument("--r", nargs="+")
    sp.add_argument("input", nargs="?", default="-", help="certificate file for from-cert")
    return p


def run(argv: Optional[Sequence[str]] = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        if args.limit is None:
            args.limit = _default_limit()
        out = _Out(args)
        code = args.func(args, out)
        out.flush()
        return code
    except Done as d:
        return d.code
    except BudgetExceeded as exc:
        print(f"budget exhausted: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except InternalAssertion as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
