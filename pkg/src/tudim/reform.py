"""Mixed-integer reformulations: checking them and building them.

``verify_wprop`` decides whether adding the integrality constraints
``W x in Z^k`` to the LP relaxation ``P`` already yields the integer hull:
the mixed-integer hull is the convex hull of the slices
``P_d = P & {W x = d}``, so it suffices that every slice vertex lies in
``conv(P & Z^n)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, product
from math import ceil, floor, gcd, lcm
from typing import Optional, Sequence

from .errors import BudgetExceeded, InputError, InternalAssertion, UnboundedError
from .exactmat import Matrix, as_vector, kernel_basis, rank, solve_linear
from .linprog import LinearProgram, feasible_point, solve_lp
from .polytope import (
    DEFAULT_LIMIT,
    HPolyhedron,
    contains_in_hull,
    integer_hull_vertices,
    vertices,
)
from .tu import is_tu, tu_kernel
from .decomp import AffineTuDecomposition, verify_affine


@dataclass(frozen=True)
class MixedIntegerModel:
    P: HPolyhedron
    W: Matrix

    def __post_init__(self):
        if self.W.cols != self.P.n:
            raise InputError(f"W has {self.W.cols} columns for {self.P.n} variables")


@dataclass(frozen=True)
class ReformVerdict:
    holds: bool
    witness: Optional[tuple] = None  # (d, v)
    slices: int = 0

    def __bool__(self):
        return self.holds


@dataclass(frozen=True)
class SeparationResult:
    h: tuple
    alpha1: Fraction
    alpha2: Fraction
    tight_p: tuple
    tight_q: tuple
    majority_side: str

    def check(self, V_P, V_Q) -> bool:
        n = len(self.h)
        dot = lambda v: sum(a * b for a, b in zip(self.h, v))  # noqa: E731
        need = (n + 2) // 2
        return (
            self.alpha1 < self.alpha2
            and all(dot(x) <= self.alpha1 for x in V_P)
            and all(dot(y) >= self.alpha2 for y in V_Q)
            and all(dot(V_P[i]) == self.alpha1 for i in self.tight_p)
            and all(dot(V_Q[i]) == self.alpha2 for i in self.tight_q)
            and max(len(self.tight_p), len(self.tight_q)) >= need
        )


# ---------------------------------------------------------------------
# the W-property: conv(P & Z^n) == conv{x in P : W x integral}
# ---------------------------------------------------------------------

def slice_range(P: HPolyhedron, W: Matrix) -> Optional[list[tuple[int, int]]]:
    """Integer range of each ``W_i x`` over ``P``; ``None`` if ``P`` is empty."""
    if W.cols != P.n:
        raise InputError("W and P disagree on the number of variables")
    if feasible_point(P.lp([0] * P.n)) is None:
        return None
    out = []
    for row in W.data:
        if not any(row):
            out.append((0, 0))
            continue
        hi = solve_lp(P.lp(row))
        lo = solve_lp(P.lp([-x for x in row]))
        if hi.status == "unbounded" or lo.status == "unbounded":
            raise UnboundedError("P is unbounded along a row of W", ray=hi.ray or lo.ray)
        out.append((ceil(-lo.value), floor(hi.value)))
    return out


def verify_wprop(P: HPolyhedron, W: Matrix, limit: int = DEFAULT_LIMIT, hull=None) -> ReformVerdict:
    """Decide ``conv(P & Z^n) == conv({x in P : W x in Z^k})`` exactly.

    The witness, if any, is the lexicographically first fractional slice
    vertex outside the integer hull, scanning slices ``d`` in lexicographic
    order.  ``hull`` may pass precomputed vertices of ``conv(P & Z^n)``.
    """
    ranges = slice_range(P, W)
    if ranges is None:
        return ReformVerdict(True)
    hull = integer_hull_vertices(P, limit).points if hull is None else tuple(hull)
    count = 1
    for lo, hi in ranges:
        count *= max(0, hi - lo + 1)
    if count > limit:
        raise BudgetExceeded(f"{count} slices exceed the limit {limit}", {"slices": count})
    checked = 0
    for d in product(*(range(lo, hi + 1) for lo, hi in ranges)):
        checked += 1
        Pd = P.with_equalities(W, d)
        try:
            verts = vertices(Pd, limit)
        except BudgetExceeded as exc:
            raise BudgetExceeded(str(exc), {"slices_checked": checked - 1, "slices": count}) from exc
        for v in verts:
            if all(isinstance(x, int) for x in v):
                continue
            if not contains_in_hull(hull, v):
                return ReformVerdict(False, (d, v), checked)
    return ReformVerdict(True, None, checked)


# ---------------------------------------------------------------------
# heavy-face separation
# ---------------------------------------------------------------------

def _dot(h, v):
    return sum(a * b for a, b in zip(h, v))


def _primitive(h, alphas):
    """Scale ``h`` (and the offsets) by a positive factor to a primitive integer vector."""
    den = 1
    for x in h:
        den = lcm(den, Fraction(x).denominator)
    hi = [int(Fraction(x) * den) for x in h]
    g = 0
    for x in hi:
        g = gcd(g, x)
    g = g or 1
    f = Fraction(den, g)
    return as_vector(x // g for x in hi), [as_vector([Fraction(a) * f])[0] for a in alphas]


def _affine_rank(points) -> int:
    if not points:
        return -1
    base = points[0]
    return rank(Matrix([[a - b for a, b in zip(p, base)] for p in points[1:]], cols=len(base)))


def _facet(points):
    """A facet ``h . x <= alpha`` of conv(points) (full-dimensional) with its tight indices."""
    n = len(points[0])
    for S in combinations(range(len(points)), n):
        base = points[S[0]]
        D = Matrix([[a - b for a, b in zip(points[i], base)] for i in S[1:]], cols=n)
        if rank(D) != n - 1:
            continue
        h = kernel_basis(D).col(0)
        alpha = _dot(h, base)
        vals = [_dot(h, p) for p in points]
        if all(v <= alpha for v in vals):
            pass
        elif all(v >= alpha for v in vals):
            h = tuple(-x for x in h)
            alpha = -alpha
        else:
            continue
        h, (alpha,) = _primitive(h, [alpha])
        tight = tuple(i for i, p in enumerate(points) if _dot(h, p) == alpha)
        return h, alpha, tight
    raise InputError("point set is not full-dimensional")


def separate_heavy_face(V_P: Sequence, V_Q: Sequence) -> SeparationResult:
    """Separate conv(V_P) from conv(V_Q) with one side tight at >= ceil((n+1)/2) points.

    Both sets are shifted so the P-centroid is twice the Q-centroid; the
    polytope of separators ``(h, alpha)`` with the P-side offset pinned is
    then bounded, and its alpha-maximal vertex is tight only at points.
    """
    V_P = [as_vector(v) for v in V_P]
    V_Q = [as_vector(v) for v in V_Q]
    pts = V_P + V_Q
    if not pts:
        raise InputError("both point sets are empty")
    n = len(pts[0])
    if _affine_rank(pts) != n:
        raise InputError("the union of the point sets is not full-dimensional")
    if not V_Q:
        h, alpha, tight = _facet(V_P)
        return SeparationResult(h, alpha, alpha + 1, tight, (), "P")
    if not V_P:
        h, alpha, tight = _facet(V_Q)
        # facet h . y <= alpha of Q becomes -h . y >= -alpha
        h = tuple(-x for x in h)
        return SeparationResult(h, -alpha - 1, -alpha, (), tight, "Q")

    xc = [sum(c, Fraction(0)) / len(V_P) for c in zip(*V_P)]
    yc = [sum(c, Fraction(0)) / len(V_Q) for c in zip(*V_Q)]
    t = [a - 2 * b for a, b in zip(xc, yc)]
    Pb = [tuple(a + b for a, b in zip(v, t)) for v in V_P]
    Qb = [tuple(a + b for a, b in zip(v, t)) for v in V_Q]

    # strict separator with a margin: variables (h, alpha, delta)
    rows = [list(x) + [-1, 1] for x in Pb] + [[-c for c in y] + [1, 1] for y in Qb]
    sep = solve_lp(LinearProgram(
        [0] * (n + 1) + [1], rows, [0] * len(rows),
        lb=[-1] * n + [None, None], ub=[1] * n + [None, 1],
    ))
    if not sep.optimal or sep.value <= 0:
        raise InputError("the convex hulls of the two point sets intersect")
    abar = sep.point[n]

    rows = [list(x) + [0] for x in Pb] + [[-c for c in y] + [1] for y in Qb] + [[0] * n + [-1]]
    rhs = [abar] * len(Pb) + [0] * len(Qb) + [-abar]
    out = solve_lp(LinearProgram([0] * n + [1], rows, rhs))
    if not out.optimal:
        raise InternalAssertion("separator polytope is unbounded")
    hh, ahat = out.point[:n], out.point[n]
    if ahat <= abar:
        raise InternalAssertion("alpha-maximal separator does not improve on the strict one")
    shift = _dot(hh, t)
    h, (a1, a2) = _primitive(hh, [abar - shift, ahat - shift])
    tight_p = tuple(i for i, x in enumerate(V_P) if _dot(h, x) == a1)
    tight_q = tuple(i for i, y in enumerate(V_Q) if _dot(h, y) == a2)
    side = "P" if len(tight_p) >= len(tight_q) else "Q"
    res = SeparationResult(h, a1, a2, tight_p, tight_q, side)
    if not res.check(V_P, V_Q):
        raise InternalAssertion("heavy-face separator violates its guarantees")
    return res


# ---------------------------------------------------------------------
# n - 2 integrality constraints for 0-1 knapsacks
# ---------------------------------------------------------------------

@dataclass
class KnapsackReform:
    W: Matrix
    P: HPolyhedron
    degenerate: bool
    separation: Optional[SeparationResult] = None
    face_points: tuple = ()
    verdict: Optional[ReformVerdict] = None
    notes: dict = field(default_factory=dict)


def knapsack_polytope(a: Sequence, b) -> HPolyhedron:
    n = len(a)
    return HPolyhedron(Matrix([list(a)], cols=n), [b], [0] * n, [1] * n)


def knapsack_reform_nminus2(a: Sequence[int], b: int, limit: int = DEFAULT_LIMIT) -> KnapsackReform:
    """A TU ``W`` with ``n - 2`` rows such that ``P`` and ``W`` satisfy the W-property.

    Degenerate knapsacks (no feasible or no infeasible 0-1 point) return an
    empty ``W``: ``P`` is then already integral or empty.
    """
    n = len(a)
    if n < 4:
        raise InputError("the n - 2 construction needs n >= 4")
    P = knapsack_polytope(a, b)
    cube = list(product((0, 1), repeat=n))
    S = [x for x in cube if _dot(a, x) <= b]
    Sc = [x for x in cube if _dot(a, x) > b]
    if not S or not Sc:
        W = Matrix.zeros(0, n)
        verdict = verify_wprop(P, W, limit)
        if not verdict:
            raise InternalAssertion("degenerate knapsack is not integral")
        return KnapsackReform(W, P, True, verdict=verdict, notes={"empty_side": "S" if not S else "S^c"})
    sep = separate_heavy_face(S, Sc)
    side, idx = (S, sep.tight_p) if sep.majority_side == "P" else (Sc, sep.tight_q)
    x1, x2, x3 = sorted(side[i] for i in idx)[:3]
    M = Matrix([[p - q for p, q in zip(x2, x1)], [p - q for p, q in zip(x3, x1)]], cols=n)
    if rank(M) != 2:
        raise InternalAssertion("three distinct 0-1 points are collinear")
    W = tu_kernel(M)
    if W.rows != n - 2 or not is_tu(W):
        raise InternalAssertion("kernel of the face directions is not a TU (n-2)-row matrix")
    verdict = verify_wprop(P, W, limit)
    if not verdict:
        raise InternalAssertion(f"constructed W fails the W-property: witness {verdict.witness}")
    return KnapsackReform(W, P, False, sep, (x1, x2, x3), verdict)


# ---------------------------------------------------------------------
# equal-sum-subsets reduction
# ---------------------------------------------------------------------

def ess_encode(b: Sequence[int]) -> tuple:
    """The row ``2 n b`` whose affine TU-dimension is below ``n`` iff ``b`` has equal-sum subsets."""
    b = as_vector(b)
    if not b or any(not isinstance(x, int) or x <= 0 for x in b):
        raise InputError("b must be a nonempty vector of positive integers")
    n = len(b)
    return tuple(2 * n * x for x in b)


def ess_solution_to_decomp(b: Sequence[int], r: Sequence[int]) -> AffineTuDecomposition:
    """An (n-1)-row affine TU decomposition of ``(2 n b)^T`` from a signed zero-sum ``r``."""
    a = ess_encode(b)
    r = as_vector(r)
    n = len(a)
    if len(r) != n or any(x not in (0, 1, -1) for x in r) or not any(r):
        raise InputError("r must be a nonzero vector in {0,+-1}^n")
    if _dot(b, r) != 0:
        raise InputError("b . r must vanish")
    W = tu_kernel(Matrix([list(r)], cols=n))
    u = solve_linear(W.T, list(b))
    if u is None or any(not isinstance(x, int) for x in u):
        raise InternalAssertion("b has no integral expression in the TU kernel rows")
    A = Matrix([list(a)], cols=n)
    D = AffineTuDecomposition(Matrix.zeros(1, n), Matrix([[2 * n * x for x in u]], cols=n - 1), W)
    chk = verify_affine(A, D)
    if not chk:
        raise InternalAssertion(f"reduction certificate invalid: {chk.reason}")
    return D


def ess_decomp_to_solution(b: Sequence[int], D: AffineTuDecomposition) -> tuple:
    """Recover a nonzero ``r`` in {0,+-1}^n with ``b . r = 0`` from a decomposition of rank < n."""
    a = ess_encode(b)
    n = len(a)
    A = Matrix([list(a)], cols=n)
    chk = verify_affine(A, D)
    if not chk:
        raise InputError(f"not a valid decomposition of 2n*b: {chk.reason}")
    if D.w_mat.rows and rank(D.w_mat) >= n:
        raise InputError("W has full column rank; its kernel is trivial")
    R = tu_kernel(D.w_mat) if D.w_mat.rows else Matrix.identity(n)
    r = R.row(0)
    if _dot(b, r) != 0:
        raise InternalAssertion("kernel row of W is not a zero-sum signing of b")
    return r
