"""Total unimodularity testing, TU kernels and TU-preserving pivots.

The testers are exponential and meant for desk-scale matrices (a few rows,
around ten columns).  Two independent methods are provided so that each can
serve as the oracle for the other.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations, product
from typing import Optional, Sequence

from .errors import InputError, InternalAssertion
from .exactmat import (
    Matrix,
    det_small,
    hstack,
    independent_columns,
    independent_rows,
    inverse,
    vstack,
)

UNIT = (0, 1, -1)
METHODS = ("minor", "ghouila-houri", "gh", "cross")


@dataclass(frozen=True)
class TuVerdict:
    is_tu: bool
    violation: Optional[tuple] = None  # (rows, cols, det), 0-based indices

    def __bool__(self):
        return self.is_tu


def _entry_violation(M: Matrix) -> Optional[TuVerdict]:
    for i, r in enumerate(M.data):
        for j, x in enumerate(r):
            if x not in UNIT:
                return TuVerdict(False, ((i,), (j,), x))
    return None


def _minor_search(data, row_pool, ncols, max_size=None) -> Optional[tuple]:
    m = len(row_pool)
    top = min(m, ncols) if max_size is None else min(m, ncols, max_size)
    for s in range(2, top + 1):
        for rs in combinations(row_pool, s):
            sub = [data[i] for i in rs]
            for cs in combinations(range(ncols), s):
                d = det_small([[r[j] for j in cs] for r in sub])
                if d not in UNIT:
                    return rs, cs, d
    return None


def _has_equitable_signing(rows: Sequence[Sequence[int]]) -> bool:
    """Is there a +-1 signing of ``rows`` whose column sums all lie in {0, +-1}?"""
    if not rows:
        return True
    ncols = len(rows[0])
    first = rows[0]
    rest = rows[1:]
    # the first row's sign is fixed by symmetry
    for signs in product((1, -1), repeat=len(rest)):
        ok = True
        for j in range(ncols):
            s = first[j]
            for sg, r in zip(signs, rest):
                s += sg * r[j]
            if s > 1 or s < -1:
                ok = False
                break
        if ok:
            return True
    return False


def _is_tu_minor(M: Matrix) -> TuVerdict:
    bad = _entry_violation(M)
    if bad is not None:
        return bad
    found = _minor_search(M.data, range(M.rows), M.cols)
    return TuVerdict(True) if found is None else TuVerdict(False, found)


def _is_tu_gh(M: Matrix) -> TuVerdict:
    bad = _entry_violation(M)
    if bad is not None:
        return bad
    for s in range(2, M.rows + 1):
        for rs in combinations(range(M.rows), s):
            if not _has_equitable_signing([M.data[i] for i in rs]):
                # rows rs carry a non-TU submatrix; locate a minimal minor there
                found = _minor_search(M.data, rs, M.cols)
                if found is None:
                    raise InternalAssertion(f"Ghouila-Houri failed on rows {rs} but every minor there is unimodular")
                return TuVerdict(False, found)
    return TuVerdict(True)


def is_tu(M: Matrix, method: str = "minor") -> TuVerdict:
    """Decide total unimodularity of an integer matrix.

    ``minor`` scans square submatrices by increasing size and reports the
    first one with determinant outside {0, +-1}.  ``ghouila-houri`` (alias
    ``gh``) looks for an equitable signing of every row subset.  ``cross``
    runs both and raises if they disagree.
    """
    if method == "minor":
        return _is_tu_minor(M)
    if method in ("ghouila-houri", "gh"):
        return _is_tu_gh(M)
    if method == "cross":
        a = _is_tu_minor(M)
        b = _is_tu_gh(M)
        if a.is_tu != b.is_tu:
            raise InternalAssertion(f"TU testers disagree on {M!r}: minor={a.is_tu}, gh={b.is_tu}")
        return a
    raise InputError(f"unknown TU method {method!r}; choose from {METHODS}")


def column_extends_tu(columns: Sequence[Sequence[int]], new: Sequence[int]) -> bool:
    """Given TU columns, is the matrix still TU after appending ``new``?

    Only square submatrices that use the new column need checking.
    """
    if any(x not in UNIT for x in new):
        return False
    m = len(new)
    nz_rows = [i for i in range(m) if new[i] != 0]
    if not nz_rows:
        return True
    ncols = len(columns)
    for s in range(2, min(m, ncols + 1) + 1):
        for rs in combinations(range(m), s):
            if all(new[i] == 0 for i in rs):
                continue
            for cs in combinations(range(ncols), s - 1):
                sub = [[columns[c][i] for c in cs] + [new[i]] for i in rs]
                if det_small(sub) not in UNIT:
                    return False
    return True


def is_unimodular(M: Matrix) -> bool:
    """Full row rank and every nonsingular maximal square submatrix has determinant +-1."""
    if not M.is_integral():
        return False
    r = M.rows
    if r > M.cols or len(independent_rows(M)) != r:
        return False
    for cs in combinations(range(M.cols), r):
        if det_small([[row[j] for j in cs] for row in M.data]) not in UNIT:
            return False
    return True


def is_almost_tu(M: Matrix) -> bool:
    """Square, not TU, but every proper submatrix TU."""
    if M.rows != M.cols:
        raise InputError("almost-TU test needs a square matrix")
    if not M.entries_in(UNIT):
        raise InputError("almost-TU test needs entries in {0, +-1}")
    n = M.rows
    if _minor_search(M.data, range(n), n, max_size=n - 1) is not None:
        return False
    return det_small(M.data) not in UNIT


def tu_kernel(M: Matrix) -> Matrix:
    """TU matrix ``W`` with entries in {0, +-1} whose rows span ker(M).

    Pivot columns are the leftmost independent ones; ``W`` has the form
    ``[-(M_B^-1 M_N)^T | I]`` with the original column order restored.
    """
    if not is_tu(M):
        raise InputError("tu_kernel needs a totally unimodular matrix")
    n = M.cols
    R = M.select_rows(independent_rows(M)) if M.rows else M
    r = R.rows
    if r == 0:
        return Matrix.identity(n)
    B = independent_columns(R)
    N = [j for j in range(n) if j not in B]
    X = inverse(R.select_cols(B)) @ R.select_cols(N)
    rows = []
    for t, j in enumerate(N):
        w = [0] * n
        for i, b in enumerate(B):
            w[b] = -X[i, t]
        w[j] = 1
        rows.append(w)
    W = Matrix(rows, cols=n)
    if not W.is_integral():
        raise InternalAssertion("TU kernel has non-integral entries")
    return W


def pivot(M: Matrix, p: int, q: int) -> Matrix:
    """Pivot on the block ``E`` of ``M = [[B, D], [E, C]]``.

    ``B`` is the top ``p`` rows by the first ``q`` columns, so ``E`` is the
    bottom-left ``(rows - p) x q`` block and must be square and nonsingular.
    Returns ``[[B E^-1, D - B E^-1 C], [-E^-1, E^-1 C]]``.
    """
    m, n = M.shape
    if not (0 <= p <= m and 0 <= q <= n) or m - p != q:
        raise InputError(f"pivot block must be square: {m - p} x {q}")
    top, bot = list(range(p)), list(range(p, m))
    left, right = list(range(q)), list(range(q, n))
    B = M.submatrix(top, left)
    D = M.submatrix(top, right)
    E = M.submatrix(bot, left)
    C = M.submatrix(bot, right)
    try:
        Ei = inverse(E)
    except InputError as exc:
        raise InputError("pivot block E is singular") from exc
    BEi = B @ Ei
    return vstack(hstack(BEi, D - BEi @ C), hstack(-Ei, Ei @ C))
