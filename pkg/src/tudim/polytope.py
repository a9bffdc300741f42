"""Exact computations on bounded rational polyhedra.

Vertices come from enumerating bases of the constraint system, lattice
points from a box scan.  Both are exponential, so each function takes a
budget and raises ``BudgetExceeded`` instead of running away.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from fractions import Fraction
from itertools import combinations, product
from math import ceil, comb, floor, lcm
from typing import Optional, Sequence

from .errors import BudgetExceeded, InputError, UnboundedError
from .exactmat import Matrix, as_vector, independent_rows
from .linprog import LinearProgram, feasible_point, solve_lp

DEFAULT_LIMIT = 10**7


def _bound(v):
    return None if v is None else as_vector([v])[0]


@dataclass(frozen=True)
class HPolyhedron:
    """``{x : A x <= b, eq_A x = eq_b, lb <= x <= ub}``; ``None`` bounds are infinite."""

    A: Matrix
    b: tuple
    lb: tuple = ()
    ub: tuple = ()
    eq_A: Optional[Matrix] = None
    eq_b: tuple = field(default=())

    def __post_init__(self):
        n = self.A.cols
        set_ = object.__setattr__
        set_(self, "b", as_vector(self.b))
        set_(self, "lb", tuple(_bound(v) for v in (self.lb or [None] * n)))
        set_(self, "ub", tuple(_bound(v) for v in (self.ub or [None] * n)))
        if self.eq_A is None:
            set_(self, "eq_A", Matrix.zeros(0, n))
        set_(self, "eq_b", as_vector(self.eq_b))
        if len(self.b) != self.A.rows:
            raise InputError(f"b has {len(self.b)} entries for {self.A.rows} rows")
        if len(self.lb) != n or len(self.ub) != n:
            raise InputError("bounds must have one entry per variable")
        if self.eq_A.cols != n or len(self.eq_b) != self.eq_A.rows:
            raise InputError("equality block has inconsistent dimensions")
        for lo, hi in zip(self.lb, self.ub):
            if lo is not None and hi is not None and lo > hi:
                raise InputError(f"lower bound {lo} exceeds upper bound {hi}")

    @classmethod
    def box(cls, lb: Sequence, ub: Sequence) -> "HPolyhedron":
        return cls(Matrix.zeros(0, len(lb)), (), lb, ub)

    @property
    def n(self) -> int:
        return self.A.cols

    def has_finite_box(self) -> bool:
        return all(v is not None for v in self.lb + self.ub)

    def inequalities(self) -> list[tuple[tuple, object]]:
        """All ``row . x <= rhs`` rows: ``A`` first, then lower, then upper bounds."""
        n = self.n
        out = [(r, bi) for r, bi in zip(self.A.data, self.b)]
        for j, lo in enumerate(self.lb):
            if lo is not None:
                out.append((tuple(-int(i == j) for i in range(n)), -lo))
        for j, hi in enumerate(self.ub):
            if hi is not None:
                out.append((tuple(int(i == j) for i in range(n)), hi))
        return out

    def contains(self, x: Sequence) -> bool:
        for r, bi in zip(self.A.data, self.b):
            if sum(a * v for a, v in zip(r, x)) > bi:
                return False
        for r, bi in zip(self.eq_A.data, self.eq_b):
            if sum(a * v for a, v in zip(r, x)) != bi:
                return False
        for v, lo, hi in zip(x, self.lb, self.ub):
            if (lo is not None and v < lo) or (hi is not None and v > hi):
                return False
        return True

    def scaled(self, k: int) -> "HPolyhedron":
        """The dilation ``k P``."""
        sc = lambda v: None if v is None else k * v  # noqa: E731
        return HPolyhedron(
            self.A, [k * x for x in self.b], [sc(v) for v in self.lb], [sc(v) for v in self.ub],
            self.eq_A, [k * x for x in self.eq_b],
        )

    def with_equalities(self, E: Matrix, e: Sequence) -> "HPolyhedron":
        rows = list(self.eq_A.data) + list(E.data)
        return HPolyhedron(self.A, self.b, self.lb, self.ub, Matrix(rows, cols=self.n), tuple(self.eq_b) + tuple(e))

    def lp(self, objective: Sequence) -> LinearProgram:
        return LinearProgram(objective, self.A, self.b, self.eq_A, self.eq_b, self.lb, self.ub)


@dataclass(frozen=True)
class VertexSet:
    points: tuple

    def __post_init__(self):
        pts = sorted(set(as_vector(p) for p in self.points))
        object.__setattr__(self, "points", tuple(pts))

    def __len__(self):
        return len(self.points)

    def __iter__(self):
        return iter(self.points)

    def __contains__(self, p):
        return as_vector(p) in self.points


def lp_box(P: HPolyhedron) -> Optional[list[tuple]]:
    """Exact per-coordinate ``(min, max)`` over ``P``; ``None`` when ``P`` is empty."""
    if feasible_point(P.lp([0] * P.n)) is None:
        return None
    out = []
    for j in range(P.n):
        e = [int(i == j) for i in range(P.n)]
        hi = solve_lp(P.lp(e))
        if hi.status == "unbounded":
            raise UnboundedError(f"coordinate {j} is unbounded above", ray=hi.ray)
        lo = solve_lp(P.lp([-x for x in e]))
        if lo.status == "unbounded":
            raise UnboundedError(f"coordinate {j} is unbounded below", ray=lo.ray)
        out.append((-lo.value, hi.value))
    return out


@lru_cache(maxsize=1 << 16)
def _scaled_inverse(rows: tuple):
    """``(adj, D)`` with ``inverse(rows) == adj / D`` and ``adj`` integral.

    Cached: slices of one polyhedron share their square systems.
    """
    n = len(rows)
    a = [[Fraction(x) for x in r] + [Fraction(int(i == j)) for j in range(n)] for i, r in enumerate(rows)]
    for c in range(n):
        p = next((i for i in range(c, n) if a[i][c] != 0), None)
        if p is None:
            return None
        a[c], a[p] = a[p], a[c]
        pr = a[c]
        pv = pr[c]
        if pv != 1:
            pr[:] = [x / pv for x in pr]
        for i in range(n):
            if i != c and a[i][c]:
                f = a[i][c]
                ai = a[i]
                for j in range(c, 2 * n):
                    ai[j] -= f * pr[j]
    D = 1
    for r in a:
        for x in r[n:]:
            D = lcm(D, x.denominator)
    return [[int(x * D) for x in r[n:]] for r in a], D


def _bound_choices(P: HPolyhedron) -> list[tuple]:
    return [tuple(v for v in (lo, hi) if v is not None) for lo, hi in zip(P.lb, P.ub)]


def _candidate_count(m: int, choices, need: int) -> int:
    # e[j] = number of ways to fix j coordinates at one of their bounds
    e = [1] + [0] * need
    for c in choices:
        for j in range(need, 0, -1):
            e[j] += e[j - 1] * len(c)
    return sum(comb(m, t) * e[need - t] for t in range(0, min(m, need) + 1))


def vertices(P: HPolyhedron, limit: int = DEFAULT_LIMIT) -> VertexSet:
    """All vertices of the bounded polyhedron ``P``.

    A vertex is fixed by the independent equality rows, ``t`` tight rows of
    ``A`` and ``n - rank(eq_A) - t`` coordinates sitting at a bound.  For
    each choice of rows and fixed coordinates the reduced square system is
    inverted once and reused for every assignment of bounds.
    """
    n = P.n
    if not P.has_finite_box():
        if lp_box(P) is None:
            return VertexSet(())
    E = P.eq_A
    keep = independent_rows(E) if E.rows else []
    Erows = [E.data[i] for i in keep]
    erhs = [P.eq_b[i] for i in keep]
    need = n - len(Erows)
    if need < 0:
        return VertexSet(())
    Arows = list(zip(P.A.data, P.b))
    choices = _bound_choices(P)
    total = _candidate_count(len(Arows), choices, need)
    if total > limit:
        raise BudgetExceeded(f"{total} candidate bases exceed the limit {limit}", {"bases": total})
    if total > 64 and P.has_finite_box() and feasible_point(P.lp([0] * n)) is None:
        # one LP is much cheaper than scanning every basis of an empty polytope
        return VertexSet(())
    found = set()
    for t in range(0, min(len(Arows), need) + 1):
        for T in combinations(range(len(Arows)), t):
            rows = Erows + [Arows[i][0] for i in T]
            rhs0 = erhs + [Arows[i][1] for i in T]
            for J in combinations([j for j in range(n) if choices[j]], need - t):
                free = [j for j in range(n) if j not in J]
                inv = _scaled_inverse(tuple(tuple(r[j] for j in free) for r in rows))
                if inv is None:
                    continue
                adj, D = inv
                for beta in product(*(choices[j] for j in J)):
                    rhs = [v - sum(r[j] * bj for j, bj in zip(J, beta)) for r, v in zip(rows, rhs0)]
                    x = [0] * n
                    for j, bj in zip(J, beta):
                        x[j] = bj
                    for j, arow in zip(free, adj):
                        num = sum(c * v for c, v in zip(arow, rhs))
                        x[j] = num // D if isinstance(num, int) and num % D == 0 else Fraction(num) / D
                    if P.contains(x):
                        found.add(as_vector(x))
    return VertexSet(found)


def integer_points(P: HPolyhedron, limit: int = DEFAULT_LIMIT) -> list[tuple]:
    """Every lattice point of the bounded polyhedron ``P``, in lexicographic order."""
    if P.has_finite_box():
        box = list(zip(P.lb, P.ub))
    else:
        box = lp_box(P)
        if box is None:
            return []
    ranges = [range(ceil(lo), floor(hi) + 1) for lo, hi in box]
    volume = 1
    for r in ranges:
        volume *= len(r)
    if volume > limit:
        raise BudgetExceeded(f"box of {volume} lattice points exceeds the limit {limit}", {"box": volume})
    return [p for p in product(*ranges) if P.contains(p)]


def _bbox_corner(p, lows, highs):
    return all(v == lo or v == hi for v, lo, hi in zip(p, lows, highs))


def extreme_points(points: Sequence[Sequence]) -> VertexSet:
    """The points of a finite set that are not convex combinations of the others."""
    pts = sorted(set(as_vector(p) for p in points))
    if len(pts) <= 2:
        return VertexSet(pts)
    lows = [min(c) for c in zip(*pts)]
    highs = [max(c) for c in zip(*pts)]
    keep = []
    for i, p in enumerate(pts):
        if _bbox_corner(p, lows, highs) or not contains_in_hull(pts[:i] + pts[i + 1 :], p):
            keep.append(p)
    return VertexSet(keep)


def integer_hull_vertices(P: HPolyhedron, limit: int = DEFAULT_LIMIT) -> VertexSet:
    return extreme_points(integer_points(P, limit))


def contains_in_hull(V, p: Sequence) -> bool:
    """Exact test of ``p in conv(V)``."""
    pts = [as_vector(v) for v in V]
    p = as_vector(p)
    if not pts:
        return False
    if any(len(v) != len(p) for v in pts):
        raise InputError("dimension mismatch between hull points and query point")
    if p in pts:
        return True
    for j in range(len(p)):
        col = [v[j] for v in pts]
        if p[j] < min(col) or p[j] > max(col):
            return False
    N = len(pts)
    A_eq = [[v[j] for v in pts] for j in range(len(p))] + [[1] * N]
    b_eq = list(p) + [1]
    lp = LinearProgram([0] * N, A_eq=A_eq, b_eq=b_eq, lb=[0] * N)
    return feasible_point(lp) is not None


@dataclass(frozen=True)
class IdpResult:
    holds: bool
    witness: Optional[tuple] = None

    def __bool__(self):
        return self.holds


def idp_check(P: HPolyhedron, k: int, limit: int = DEFAULT_LIMIT) -> IdpResult:
    """Check that every lattice point of ``k P`` is a sum of ``k`` lattice points of ``P``.

    The first undecomposable point in lexicographic order is returned as a
    witness.
    """
    if k < 1:
        raise InputError("k must be positive")
    pts = integer_points(P, limit)
    if set(extreme_points(pts).points) != set(vertices(P, limit).points):
        raise InputError("idp_check needs an integral polytope")
    scaled = {j: P.scaled(j) for j in range(1, k + 1)}

    def split(z, parts, start):
        if parts == 1:
            return P.contains(z)
        for idx in range(start, len(pts)):
            x = pts[idx]
            rest = tuple(a - b for a, b in zip(z, x))
            if scaled[parts - 1].contains(rest) and split(rest, parts - 1, idx):
                return True
        return False

    for z in integer_points(scaled[k], limit):
        if not split(z, k, 0):
            return IdpResult(False, z)
    return IdpResult(True)
