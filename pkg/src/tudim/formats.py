"""File formats: instance text, model JSON and certificate JSON.

Every number is written as a string ("3", "-1/2") so that JSON round trips
are bit-exact.  JSON is canonical: sorted keys, fixed indentation.
"""

from __future__ import annotations

import json
from fractions import Fraction
from typing import Optional

from .decomp import AffineTuDecomposition, TuDecomposition
from .errors import InputError
from .exactmat import Matrix, as_vector, format_entry, format_matrix, parse_matrix_lines
from .polytope import HPolyhedron
from .reform import MixedIntegerModel, ReformVerdict


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def _num(tok: str):
    try:
        return as_vector([Fraction(tok)])[0]
    except (ValueError, ZeroDivisionError) as exc:
        raise InputError(f"bad number {tok!r}") from exc


def _bound_tok(x) -> str:
    return "inf" if x is None else format_entry(x)


def _parse_bound(tok: str, sign: str):
    """``sign`` is ``"-"`` for lower bounds (accepting -inf) and ``""`` for upper bounds."""
    if tok in ("inf", "+inf", "-inf"):
        if (tok == "-inf") != (sign == "-"):
            raise InputError(f"{tok!r} is not a valid {'lower' if sign else 'upper'} bound")
        return None
    return _num(tok)


def _content_lines(text: str) -> list[str]:
    return [ln for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]


# ---------------------------------------------------------------------
# instance text: matrix A, then one line each for b, lb, ub
# ---------------------------------------------------------------------

def format_instance(P: HPolyhedron) -> str:
    if P.eq_A.rows:
        raise InputError("the instance format has no equality block")
    out = format_matrix(P.A)
    if P.A.rows:
        out += " ".join(format_entry(x) for x in P.b) + "\n"
    out += " ".join("-inf" if x is None else format_entry(x) for x in P.lb) + "\n"
    out += " ".join(_bound_tok(x) for x in P.ub) + "\n"
    return out


def parse_instance(text: str) -> HPolyhedron:
    """Inverse of ``format_instance``.  With zero rows the ``b`` line is omitted."""
    lines = _content_lines(text)
    A, used = parse_matrix_lines(lines)
    rest = lines[used:]
    need = 3 if A.rows else 2
    if len(rest) != need:
        raise InputError(f"expected {need} lines after the matrix, found {len(rest)}")
    if A.rows:
        b = [_num(t) for t in rest[0].split()]
        rest = rest[1:]
    else:
        b = []
    lb = [_parse_bound(t, "-") for t in rest[0].split()]
    ub = [_parse_bound(t, "") for t in rest[1].split()]
    return HPolyhedron(A, b, lb, ub)


# ---------------------------------------------------------------------
# JSON helpers
# ---------------------------------------------------------------------

def matrix_to_json(M: Matrix) -> dict:
    return {"rows": M.rows, "cols": M.cols, "entries": [[format_entry(x) for x in r] for r in M.data]}


def matrix_from_json(obj, name: str = "matrix") -> Matrix:
    if isinstance(obj, dict):
        try:
            m, n, rows = int(obj["rows"]), int(obj["cols"]), obj["entries"]
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError(f"{name}: need rows, cols and entries") from exc
        if len(rows) != m:
            raise InputError(f"{name}: {len(rows)} rows listed, header says {m}")
    elif isinstance(obj, list):
        rows = obj
        n = len(rows[0]) if rows else 0
    else:
        raise InputError(f"{name}: not a matrix")
    if any(not isinstance(r, list) or len(r) != n for r in rows):
        raise InputError(f"{name}: ragged rows")
    return Matrix([[_num(str(x)) for x in r] for r in rows], cols=n)


def vector_to_json(v) -> list:
    return [format_entry(x) for x in v]


def vector_from_json(obj, name="vector") -> tuple:
    if not isinstance(obj, list):
        raise InputError(f"{name}: expected a list")
    return tuple(_num(str(x)) for x in obj)


def _load(text: str, what: str) -> dict:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{what} is not valid JSON: {exc}") from exc
    if not isinstance(obj, dict):
        raise InputError(f"{what} must be a JSON object")
    return obj


# ---------------------------------------------------------------------
# model JSON
# ---------------------------------------------------------------------

def model_to_json(M: MixedIntegerModel, **extra) -> dict:
    P = M.P
    if P.eq_A.rows:
        raise InputError("the model format has no equality block")
    obj = {
        "A": matrix_to_json(P.A),
        "b": vector_to_json(P.b),
        "lb": ["-inf" if x is None else format_entry(x) for x in P.lb],
        "ub": [_bound_tok(x) for x in P.ub],
        "W": matrix_to_json(M.W),
    }
    obj.update(extra)
    return obj


def polyhedron_from_json(obj: dict) -> HPolyhedron:
    try:
        A = matrix_from_json(obj["A"], "A")
        b = vector_from_json(obj["b"], "b")
        lb = [_parse_bound(str(t), "-") for t in obj.get("lb", ["-inf"] * A.cols)]
        ub = [_parse_bound(str(t), "") for t in obj.get("ub", ["inf"] * A.cols)]
    except KeyError as exc:
        raise InputError(f"model is missing field {exc}") from exc
    return HPolyhedron(A, b, lb, ub)


def model_from_json(text: str) -> MixedIntegerModel:
    obj = _load(text, "model")
    if "W" not in obj:
        raise InputError("model is missing field 'W'")
    return MixedIntegerModel(polyhedron_from_json(obj), matrix_from_json(obj["W"], "W"))


def verdict_to_json(v: ReformVerdict) -> dict:
    out = {"holds": v.holds, "slices_checked": v.slices}
    if v.witness is not None:
        d, x = v.witness
        out["witness"] = {"d": vector_to_json(d), "v": vector_to_json(x)}
    return out


# ---------------------------------------------------------------------
# certificate JSON
# ---------------------------------------------------------------------

def certificate_to_json(A: Matrix, D, verified: bool = True, generator: Optional[str] = None) -> dict:
    obj = {
        "m": A.rows,
        "n": A.cols,
        "k": D.k,
        "A": matrix_to_json(A),
        "U": matrix_to_json(D.u_mat),
        "W": matrix_to_json(D.w_mat),
        "verified": verified,
        "generator": generator,
    }
    if isinstance(D, AffineTuDecomposition):
        obj["kind"] = "affine"
        obj["A_tilde"] = matrix_to_json(D.a_tilde)
    else:
        obj["kind"] = "tu"
    return obj


def certificate_from_json(text: str) -> tuple[Matrix, object, dict]:
    obj = _load(text, "certificate")
    try:
        kind = obj["kind"]
        A = matrix_from_json(obj["A"], "A")
        U = matrix_from_json(obj["U"], "U")
        W = matrix_from_json(obj["W"], "W")
    except KeyError as exc:
        raise InputError(f"certificate is missing field {exc}") from exc
    # the inner dimensions of an empty U are lost in list form
    if U.cols != W.rows and U.cols == 0:
        U = Matrix.zeros(A.rows, W.rows)
    if kind == "affine":
        if "A_tilde" not in obj:
            raise InputError("affine certificate is missing field 'A_tilde'")
        D = AffineTuDecomposition(matrix_from_json(obj["A_tilde"], "A_tilde"), U, W)
    elif kind == "tu":
        D = TuDecomposition(U, W)
    else:
        raise InputError(f"unknown certificate kind {kind!r}")
    return A, D, obj
