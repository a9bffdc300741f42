"""TU and affine TU decompositions: verification, normalization and search.

An affine TU decomposition of ``A`` is ``A = A_tilde + U W`` with ``W`` in
{0, +-1} and the stacked matrix ``[A_tilde; W]`` totally unimodular; a TU
decomposition is the homogeneous case ``A = U W`` with ``W`` TU.  The
(affine) TU-dimension is the fewest rows of ``W`` possible.

The dimension searches enumerate ``W = [I_k W2]`` (identity at a column set
``J``) column by column, keeping the stacked matrix TU at every step.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Optional, Sequence

from .errors import BudgetExceeded, InputError, InternalAssertion
from .exactmat import (
    Matrix,
    all_pm1_vectors,
    hnf_columns,
    independent_columns,
    independent_rows,
    inverse,
    rank,
    solve_linear,
    vstack,
)
from .tu import UNIT, column_extends_tu, is_tu, is_unimodular

DEFAULT_LIMIT = 10**7


@dataclass(frozen=True)
class AffineTuDecomposition:
    a_tilde: Matrix
    u_mat: Matrix
    w_mat: Matrix

    @property
    def k(self) -> int:
        return self.w_mat.rows

    def product(self) -> Matrix:
        return self.a_tilde + self.u_mat @ self.w_mat

    def stacked(self) -> Matrix:
        return vstack(self.a_tilde, self.w_mat)


@dataclass(frozen=True)
class TuDecomposition:
    u_mat: Matrix
    w_mat: Matrix

    @property
    def k(self) -> int:
        return self.w_mat.rows

    def product(self) -> Matrix:
        return self.u_mat @ self.w_mat


@dataclass(frozen=True)
class Check:
    ok: bool
    reason: str = "valid"

    def __bool__(self):
        return self.ok


@dataclass(frozen=True)
class LowerBounds:
    rank_bound: int
    heller_tu: int
    heller_affine: int
    distinct_columns: int


@dataclass
class DimensionReport:
    kind: str
    value: int
    exact: bool
    certificate: object = None
    bounds: Optional[LowerBounds] = None
    searched: dict = field(default_factory=dict)
    candidates: int = 0

    def describe(self) -> str:
        return str(self.value) if self.exact else f">= {self.value}"


# ---------------------------------------------------------------------
# verification
# ---------------------------------------------------------------------

def _product_mismatch(A: Matrix, P: Matrix) -> Optional[str]:
    for j in range(A.cols):
        if A.col(j) != P.col(j):
            return f"product mismatch at column {j + 1}"
    return None


def verify_affine(A: Matrix, D: AffineTuDecomposition) -> Check:
    m, n = A.shape
    k = D.w_mat.rows
    if D.a_tilde.shape != (m, n) or D.u_mat.shape != (m, k) or D.w_mat.cols != n:
        return Check(False, "dimension mismatch")
    if not (D.u_mat.is_integral() and D.a_tilde.is_integral() and D.w_mat.is_integral()):
        return Check(False, "non-integral entry")
    bad = _product_mismatch(A, D.product())
    if bad:
        return Check(False, bad)
    if not D.w_mat.entries_in(UNIT):
        return Check(False, "W has an entry outside {0,+-1}")
    if not D.a_tilde.entries_in(UNIT):
        return Check(False, "A_tilde has an entry outside {0,+-1}")
    verdict = is_tu(D.stacked())
    if not verdict:
        rows, cols, d = verdict.violation
        return Check(False, f"[A_tilde; W] is not TU: rows {[r + 1 for r in rows]}, cols {[c + 1 for c in cols]}, det {d}")
    return Check(True)


def verify_tu(A: Matrix, D: TuDecomposition) -> Check:
    m, n = A.shape
    k = D.w_mat.rows
    if D.u_mat.shape != (m, k) or D.w_mat.cols != n:
        return Check(False, "dimension mismatch")
    if not (D.u_mat.is_integral() and D.w_mat.is_integral()):
        return Check(False, "non-integral entry")
    bad = _product_mismatch(A, D.product())
    if bad:
        return Check(False, bad)
    if not D.w_mat.entries_in(UNIT):
        return Check(False, "W has an entry outside {0,+-1}")
    verdict = is_tu(D.w_mat)
    if not verdict:
        rows, cols, d = verdict.violation
        return Check(False, f"W is not TU: rows {[r + 1 for r in rows]}, cols {[c + 1 for c in cols]}, det {d}")
    return Check(True)


def _assert_valid(A, D):
    chk = verify_affine(A, D) if isinstance(D, AffineTuDecomposition) else verify_tu(A, D)
    if not chk:
        raise InternalAssertion(f"constructed decomposition failed verification: {chk.reason}")
    return D


# ---------------------------------------------------------------------
# normalization
# ---------------------------------------------------------------------

def reduce_full_rank(A: Matrix, D: AffineTuDecomposition) -> AffineTuDecomposition:
    """Drop dependent rows of ``W``, folding them into ``U`` via an integral ``R``."""
    if not verify_affine(A, D):
        raise InputError("reduce_full_rank needs a valid decomposition")
    W, U = D.w_mat, D.u_mat
    if W.rows == 0:
        return D
    I = independent_rows(W)
    if len(I) == W.rows:
        return D
    WI = W.select_rows(I)
    U_new = [list(U.col(i)) for i in I]  # columns of U_I
    for j in range(W.rows):
        if j in I:
            continue
        r = solve_linear(WI.T, W.row(j))
        if r is None or any(not isinstance(x, int) for x in r):
            raise InternalAssertion(f"row {j + 1} of W has no integral expression in the independent rows")
        uj = U.col(j)
        for t, rt in enumerate(r):
            if rt:
                U_new[t] = [a + rt * b for a, b in zip(U_new[t], uj)]
    out = AffineTuDecomposition(D.a_tilde, Matrix.from_columns(U_new, A.rows), WI)
    return _assert_valid(A, out)


def canonicalize_identity(W: Matrix) -> tuple[Matrix, Matrix, list[int]]:
    """Return ``(T, T W, J)`` where ``T W`` has the identity in columns ``J``.

    ``J`` is the leftmost set of independent columns and ``T`` is the
    inverse of ``W[:, J]``, unimodular because ``W`` is TU.
    """
    if rank(W) != W.rows:
        raise InputError("canonicalize_identity needs full row rank; reduce first")
    if not is_tu(W):
        raise InputError("canonicalize_identity needs a TU matrix")
    J = independent_columns(W)
    T = inverse(W.select_cols(J))
    if not T.is_integral():
        raise InternalAssertion("inverse of a TU basis is not integral")
    return T, T @ W, J


def canonicalize_decomposition(A: Matrix, D: AffineTuDecomposition) -> tuple[AffineTuDecomposition, list[int]]:
    """Rewrite a full-rank decomposition so that ``W`` contains the identity."""
    T, W2, J = canonicalize_identity(D.w_mat)
    At = D.a_tilde
    AtJ = At.select_cols(J)
    a_new = At - AtJ @ W2
    u_new = AtJ + D.u_mat @ D.w_mat.select_cols(J)
    return _assert_valid(A, AffineTuDecomposition(a_new, u_new, W2)), J


def _identity_columns(W: Matrix, identity_cols) -> list[int]:
    k = W.rows
    if identity_cols is None:
        J = []
        for i in range(k):
            e = tuple(int(t == i) for t in range(k))
            j = next((j for j in range(W.cols) if W.col(j) == e), None)
            if j is None:
                raise InputError(f"W has no unit column e_{i + 1}")
            J.append(j)
        return J
    J = list(identity_cols)
    if len(J) != k or len(set(J)) != k:
        raise InputError("identity column list must name k distinct columns")
    if W.select_cols(J) != Matrix.identity(k):
        raise InputError(f"W has no identity at columns {[j + 1 for j in J]}")
    return J


def decide_affine_given_w(A: Matrix, W: Matrix, identity_cols=None) -> Optional[AffineTuDecomposition]:
    """Affine TU decomposition of ``A`` using ``W`` (identity at ``identity_cols``), if one exists.

    Exists iff ``[A_N - A_J W_N; W_N]`` is TU; the decomposition is then
    ``U = A_J`` and ``A_tilde = A - A_J W``.
    """
    if A.cols != W.cols:
        raise InputError("A and W must have the same number of columns")
    if not W.entries_in(UNIT):
        raise InputError("W must have entries in {0,+-1}")
    J = _identity_columns(W, identity_cols)
    N = [j for j in range(A.cols) if j not in J]
    AJ = A.select_cols(J)
    X = A.select_cols(N) - AJ @ W.select_cols(N)
    if not is_tu(vstack(X, W.select_cols(N))):
        return None
    D = AffineTuDecomposition(A - AJ @ W, AJ, W)
    return _assert_valid(A, D)


def decide_tu_given_w(A: Matrix, W: Matrix) -> Optional[TuDecomposition]:
    """TU decomposition ``A = U W`` for a fixed TU ``W`` of full row rank, if one exists."""
    if A.cols != W.cols:
        raise InputError("A and W must have the same number of columns")
    if not W.entries_in(UNIT) or not is_tu(W):
        raise InputError("W must be TU")
    if rank(W) != W.rows:
        raise InputError("W must have full row rank")
    J = independent_columns(W)
    U = A.select_cols(J) @ inverse(W.select_cols(J))
    if not U.is_integral() or U @ W != A:
        return None
    return _assert_valid(A, TuDecomposition(U, W))


# ---------------------------------------------------------------------
# bounds and column preprocessing
# ---------------------------------------------------------------------

def dedup_columns(A: Matrix) -> tuple[Matrix, list[int]]:
    """Keep first occurrences of each column; ``source[j]`` is column ``j``'s index in the result."""
    seen = {}
    keep = []
    source = []
    for j in range(A.cols):
        c = A.col(j)
        if c not in seen:
            seen[c] = len(keep)
            keep.append(j)
        source.append(seen[c])
    return A.select_cols(keep), source


def lift_columns(D, source: Sequence[int]):
    """Lift a decomposition of the deduplicated matrix back to the original columns."""
    if isinstance(D, AffineTuDecomposition):
        return AffineTuDecomposition(D.a_tilde.select_cols(source), D.u_mat, D.w_mat.select_cols(source))
    return TuDecomposition(D.u_mat, D.w_mat.select_cols(source))


def _heller_rows(c: int) -> int:
    k = 0
    while k * k + k + 1 < c:
        k += 1
    return k


def lower_bounds(A: Matrix) -> LowerBounds:
    """Rank bound and the bounds from Heller's column count ``k^2 + k + 1``."""
    c = dedup_columns(A)[0].cols
    return LowerBounds(
        rank_bound=rank(A),
        heller_tu=_heller_rows(c),
        heller_affine=max(0, _heller_rows(c) - A.rows),
        distinct_columns=c,
    )


# ---------------------------------------------------------------------
# exhaustive search
# ---------------------------------------------------------------------

class _Counter:
    def __init__(self, limit):
        self.limit = limit
        self.used = 0

    def tick(self, k):
        self.used += 1
        if self.used > self.limit:
            raise BudgetExceeded(f"candidate limit {self.limit} reached at k = {k}", {"k": k, "candidates": self.used})


def _search_k(A: Matrix, k: int, affine: bool, counter: _Counter) -> Optional[Matrix]:
    """First ``W = [I_k W2]`` (in lexicographic order) that decomposes ``A``."""
    m, n = A.shape
    cols = A.columns()
    for J in combinations(range(n), k):
        counter.tick(k)
        N = [j for j in range(n) if j not in J]
        AJ = [cols[j] for j in J]
        cands = []
        for j in N:
            opts = []
            for w in all_pm1_vectors(k):
                # a lexicographically earlier identity position exists: not canonical
                if any(j < J[i] and w == tuple(s * int(t == i) for t in range(k)) for i in range(k) for s in (1, -1)):
                    continue
                prod = [sum(AJ[t][r] * w[t] for t in range(k)) for r in range(m)]
                if affine:
                    x = tuple(a - p for a, p in zip(cols[j], prod))
                    if any(v not in UNIT for v in x):
                        continue
                    opts.append((w, x + w))
                else:
                    if tuple(prod) != cols[j]:
                        continue
                    opts.append((w, w))
            if not opts:
                break
            cands.append(opts)
        else:
            chosen: list = []
            picks: list = []

            def rec(i):
                if i == len(N):
                    return True
                for w, s in cands[i]:
                    counter.tick(k)
                    if column_extends_tu(chosen, s):
                        chosen.append(s)
                        picks.append(w)
                        if rec(i + 1):
                            return True
                        chosen.pop()
                        picks.pop()
                return False

            if rec(0):
                wcols = [None] * n
                for t, j in enumerate(J):
                    wcols[j] = tuple(int(r == t) for r in range(k))
                for j, w in zip(N, picks):
                    wcols[j] = w
                return Matrix.from_columns(wcols, k)
    return None


def affine_tu_dimension(A: Matrix, limit: int = DEFAULT_LIMIT) -> DimensionReport:
    """Exact affine TU-dimension by enumeration over ``k`` ascending.

    On budget exhaustion the report carries a certified lower bound instead.
    """
    m, n = A.shape
    Ad, source = dedup_columns(A)
    lb = lower_bounds(A)
    rep = DimensionReport("affine", 0, True, bounds=lb)
    if is_tu(A):
        rep.certificate = AffineTuDecomposition(A, Matrix.zeros(m, 0), Matrix.zeros(0, n))
        rep.searched[0] = "found"
        return rep
    rep.searched[0] = "exhausted"
    start = max(1, lb.heller_affine)
    for k in range(1, start):
        rep.searched[k] = "excluded by Heller bound"
    counter = _Counter(limit)
    for k in range(start, Ad.cols + 1):
        try:
            W = _search_k(Ad, k, True, counter)
        except BudgetExceeded:
            rep.value, rep.exact = k, False
            rep.searched[k] = "budget"
            rep.candidates = counter.used
            return rep
        if W is None:
            rep.searched[k] = "exhausted"
            continue
        D = decide_affine_given_w(Ad, W)
        rep.value = k
        rep.searched[k] = "found"
        rep.certificate = _assert_valid(A, lift_columns(D, source))
        rep.candidates = counter.used
        return rep
    raise InternalAssertion("no decomposition found up to k = number of distinct columns")


def tu_dimension(A: Matrix, limit: int = DEFAULT_LIMIT) -> DimensionReport:
    """Exact TU-dimension by the same enumeration with ``A_tilde = 0``."""
    m, n = A.shape
    Ad, source = dedup_columns(A)
    lb = lower_bounds(A)
    rep = DimensionReport("tu", 0, True, bounds=lb)
    if lb.rank_bound == 0:
        rep.certificate = TuDecomposition(Matrix.zeros(m, 0), Matrix.zeros(0, n))
        rep.searched[0] = "found"
        return rep
    start = max(lb.rank_bound, lb.heller_tu, 1)
    for k in range(0, start):
        rep.searched[k] = "excluded by lower bounds"
    counter = _Counter(limit)
    for k in range(start, Ad.cols + 1):
        try:
            W = _search_k(Ad, k, False, counter)
        except BudgetExceeded:
            rep.value, rep.exact = k, False
            rep.searched[k] = "budget"
            rep.candidates = counter.used
            return rep
        if W is None:
            rep.searched[k] = "exhausted"
            continue
        D = decide_tu_given_w(Ad, W)
        if D is None:
            raise InternalAssertion("search hit does not yield a TU decomposition")
        rep.value = k
        rep.searched[k] = "found"
        rep.certificate = _assert_valid(A, lift_columns(D, source))
        rep.candidates = counter.used
        return rep
    raise InternalAssertion("no TU decomposition found up to k = number of distinct columns")


# ---------------------------------------------------------------------
# change of variables
# ---------------------------------------------------------------------

def change_of_variables(W: Matrix, A: Matrix, c: Sequence) -> tuple[Matrix, Matrix, tuple]:
    """``(L, A L, c^T L)`` with ``W L = [I 0]``, so ``W x`` integral becomes ``y_1..y_k`` integral."""
    if not is_unimodular(W):
        raise InputError("change_of_variables needs a unimodular W")
    if A.cols != W.cols or len(c) != W.cols:
        raise InputError("A, c and W must agree on the number of variables")
    L, H = hnf_columns(W)
    if H != Matrix.identity(W.rows):
        raise InternalAssertion("Hermite form of a unimodular matrix is not the identity")
    cL = Matrix.row_vector(c) @ L
    return L, A @ L, cL.row(0)
