"""Generators for the example families: parity, master knapsack, powers of two,
the knapsack lower-bound instances, big/small-weight knapsacks, block
structure and almost-TU matrices.  All generators are pure.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from math import isqrt
from typing import Sequence

from .decomp import AffineTuDecomposition, TuDecomposition, verify_affine
from .errors import InputError, InternalAssertion
from .exactmat import Matrix, as_vector, block_diag, hstack, vstack
from .polytope import HPolyhedron
from .reform import MixedIntegerModel, knapsack_polytope
from .tu import is_almost_tu, is_tu

# The 4x3 parity matrix of the integer decomposition discussion, with its
# 2-row affine TU decomposition.
PARITY3_A = Matrix([[1, 1, 1], [-1, 1, 1], [1, -1, 1], [1, 1, -1]])
PARITY3_DECOMP = AffineTuDecomposition(
    Matrix([[1, 0, 0], [-1, 0, 0], [1, 0, 0], [1, 0, 0]]),
    Matrix([[1, 1], [1, 1], [-1, 1], [1, -1]]),
    Matrix([[0, 1, 0], [0, 0, 1]]),
)


def parity3_polytope() -> HPolyhedron:
    """Natural description of the 3-dimensional parity polytope.

    Its integer points are the even-support 0-1 vectors.
    """
    A = Matrix([[1, 1, 1], [1, -1, -1], [-1, 1, -1], [-1, -1, 1]])
    return HPolyhedron(A, (2, 0, 0, 0), (0, 0, 0), (1, 1, 1))


def gen_parity(n: int) -> tuple[MixedIntegerModel, AffineTuDecomposition]:
    """Even-support vectors in ``[0,1]^n`` via one integer variable ``z``: ``sum x + 2 z = 0``."""
    if n < 1:
        raise InputError("n must be positive")
    A = Matrix([[1] * n + [2], [-1] * n + [-2]])
    P = HPolyhedron(A, (0, 0), [0] * n + [-(n // 2)], [1] * n + [0])
    W = Matrix([[0] * n + [1]])
    D = AffineTuDecomposition(
        Matrix([[1] * n + [0], [-1] * n + [0]]), Matrix([[2], [-2]]), W
    )
    return MixedIntegerModel(P, W), D


def gen_master(n: int) -> tuple[tuple, TuDecomposition, AffineTuDecomposition]:
    """``a = (1, ..., n)`` with a (2l-1)-row TU and a (2l-2)-row affine TU decomposition.

    The square construction for ``l = ceil(sqrt(n))`` is truncated to the
    first ``n`` columns; block rows that become zero are dropped.
    """
    if n < 1:
        raise InputError("n must be positive")
    l = isqrt(n - 1) + 1
    rows = []
    u = []
    for r in range(l):
        rows.append([int(j % l == r) for j in range(n)])
        u.append(r + 1)
    for t in range(1, l):
        row = [int(j // l == t) for j in range(n)]
        if any(row):
            rows.append(row)
            u.append(t * l)
    W = Matrix(rows, cols=n)
    a = tuple(range(1, n + 1))
    tu = TuDecomposition(Matrix([u], cols=len(u)), W)
    aff = AffineTuDecomposition(
        Matrix([rows[0]], cols=n), Matrix([u[1:]], cols=len(u) - 1), W.select_rows(range(1, W.rows))
    )
    return a, tu, aff


def gen_powers(n: int) -> tuple:
    if n < 1:
        raise InputError("n must be positive")
    return tuple(2 ** i for i in range(1, n + 1))


def gen_lower_bound_instance(m: int) -> HPolyhedron:
    """Knapsack in ``2m`` variables that needs at least ``m`` integrality constraints."""
    if m < 1:
        raise InputError("m must be positive")
    half = [2 ** i for i in range(1, m + 1)]
    return knapsack_polytope(half + half, 2 ** (m + 1) - 1)


# ---------------------------------------------------------------------
# big and small weights
# ---------------------------------------------------------------------

@dataclass(frozen=True)
class BigSmallInstance:
    small: tuple
    big: tuple
    k: int
    b: object

    def __post_init__(self):
        object.__setattr__(self, "small", as_vector(self.small))
        object.__setattr__(self, "big", as_vector(self.big))
        object.__setattr__(self, "b", as_vector([self.b])[0])
        k, b = self.k, self.b
        if k < 3:
            raise InputError("k must be at least 3")
        if len(self.small) < k:
            raise InputError(f"need at least k = {k} small weights, got {len(self.small)}")
        if list(self.small) != sorted(self.small):
            raise InputError("small weights must be sorted increasingly")
        for i, w in enumerate(self.small):
            if not Fraction(b, k + 1) < w:
                raise InputError(f"small weight {i + 1} violates a > b/(k+1)")
            if not w <= Fraction(b, k):
                raise InputError(f"small weight {i + 1} violates a <= b/k")
        for i, w in enumerate(self.big):
            if not Fraction((k - 1) * b, k + 1) < w:
                raise InputError(f"big weight {i + 1} violates a > (k-1)b/(k+1)")
            if not w <= b:
                raise InputError(f"big weight {i + 1} violates a <= b")

    @property
    def weights(self) -> tuple:
        return self.small + self.big

    @property
    def n(self) -> int:
        return len(self.small) + len(self.big)


@dataclass(frozen=True)
class Facet:
    coeffs: tuple
    rhs: int
    label: str


def _heavy_partners(inst: BigSmallInstance, i: int) -> list[int]:
    s = len(inst.small)
    return [s + j for j, w in enumerate(inst.big) if w > inst.b - inst.small[i]]


def _family_row(inst: BigSmallInstance, members, i: int, mult: int) -> tuple:
    s, n = len(inst.small), inst.n
    row = [0] * n
    for j in members:
        row[j] += 1
    for j in _heavy_partners(inst, i):
        row[j] += 1
    for j in range(s, n):
        row[j] += mult
    return tuple(row)


def _suffix_rows(inst: BigSmallInstance, last: int) -> list[Facet]:
    s, k = len(inst.small), inst.k
    return [
        Facet(_family_row(inst, range(i, s), i, k - 1), k, f"suffix {i + 1}")
        for i in range(last)
    ]


def gen_big_small(inst: BigSmallInstance) -> tuple[list[Facet], MixedIntegerModel]:
    """Facet list of the knapsack integer hull and the one-integer-variable description."""
    s, n, k = len(inst.small), inst.n, inst.k
    facets = [Facet(tuple(-int(i == j) for i in range(n)), 0, f"x{j + 1} >= 0") for j in range(n)]
    facets.append(Facet(tuple(int(j >= s) for j in range(n)), 1, "big sum"))
    facets += _suffix_rows(inst, s - k + 1)
    for r in range(1, k):
        for R in combinations(range(s), r):
            # smallest weight in R, ties to the smallest index
            iR = min(R, key=lambda i: (inst.small[i], i))
            label = "R = {" + ",".join(str(i + 1) for i in R) + "}"
            facets.append(Facet(_family_row(inst, R, iR, r - 1), r, label))
    mi_rows = _suffix_rows(inst, s)
    P = HPolyhedron(Matrix([f.coeffs for f in mi_rows], cols=n), [f.rhs for f in mi_rows], [0] * n, [1] * n)
    W = Matrix([[int(j >= s) for j in range(n)]])
    return facets, MixedIntegerModel(P, W)


def facet_polytope(facets: Sequence[Facet], n: int) -> HPolyhedron:
    return HPolyhedron(Matrix([f.coeffs for f in facets], cols=n), [f.rhs for f in facets])


def big_small_knapsack(inst: BigSmallInstance) -> HPolyhedron:
    return knapsack_polytope(inst.weights, inst.b)


# ---------------------------------------------------------------------
# block structure and almost-TU matrices
# ---------------------------------------------------------------------

def block_compose(blocks: Sequence[tuple[Matrix, Matrix]], u_blocks: Sequence[Matrix]) -> tuple[Matrix, AffineTuDecomposition]:
    """Block-diagonal ``A^i`` coupled by the rows ``[U^1 Abar^1 ... U^r Abar^r]``."""
    if not blocks or len(blocks) != len(u_blocks):
        raise InputError("need one U block per (A, Abar) block")
    k = u_blocks[0].rows
    for i, ((Ai, Bi), Ui) in enumerate(zip(blocks, u_blocks)):
        if Ai.cols != Bi.cols:
            raise InputError(f"block {i + 1}: A and Abar differ in width")
        if Ui.rows != k or Ui.cols != Bi.rows:
            raise InputError(f"block {i + 1}: U has shape {Ui.shape}, expected ({k}, {Bi.rows})")
        if not is_tu(vstack(Ai, Bi)):
            raise InputError(f"block {i + 1}: stacked [A; Abar] is not TU")
    top = block_diag(*(Ai for Ai, _ in blocks))
    coupling = hstack(*(Ui @ Bi for (_, Bi), Ui in zip(blocks, u_blocks)))
    A = vstack(top, coupling)
    W = block_diag(*(Bi for _, Bi in blocks))
    U = vstack(Matrix.zeros(top.rows, W.rows), hstack(*u_blocks))
    D = AffineTuDecomposition(vstack(top, Matrix.zeros(k, top.cols)), U, W)
    chk = verify_affine(A, D)
    if not chk:
        raise InternalAssertion(f"block composition produced an invalid certificate: {chk.reason}")
    return A, D


def almost_tu_decomp(A: Matrix) -> AffineTuDecomposition:
    """One-row decomposition ``A = [0 Abar] + a e_1^T`` of an almost-TU ``A = [a Abar]``."""
    if not is_almost_tu(A):
        raise InputError("matrix is not almost totally unimodular")
    n = A.rows
    a_tilde = hstack(Matrix.zeros(n, 1), A.select_cols(range(1, A.cols)))
    D = AffineTuDecomposition(a_tilde, A.select_cols([0]), Matrix([[1] + [0] * (A.cols - 1)]))
    chk = verify_affine(A, D)
    if not chk:
        raise InternalAssertion(f"almost-TU decomposition invalid: {chk.reason}")
    return D
