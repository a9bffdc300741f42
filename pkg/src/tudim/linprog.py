"""Exact rational linear programming by the two-phase primal simplex method.

Every pivot uses Bland's rule, so the method terminates without any
perturbation; every number is a ``Fraction`` and no tolerance appears.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .errors import InputError
from .exactmat import Matrix, as_vector

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"


def _rows(M) -> tuple:
    if M is None:
        return ()
    if isinstance(M, Matrix):
        return M.data
    return tuple(as_vector(r) for r in M)


@dataclass(frozen=True)
class LinearProgram:
    """maximize ``objective . x`` s.t. ``A_ub x <= b_ub``, ``A_eq x = b_eq``, ``lb <= x <= ub``.

    A bound of ``None`` means that side is unbounded.
    """

    objective: tuple
    A_ub: tuple = ()
    b_ub: tuple = ()
    A_eq: tuple = ()
    b_eq: tuple = ()
    lb: tuple = ()
    ub: tuple = ()

    def __init__(self, objective, A_ub=None, b_ub=(), A_eq=None, b_eq=(), lb=None, ub=None):
        n = len(objective)
        set_ = object.__setattr__
        set_(self, "objective", as_vector(objective))
        set_(self, "A_ub", _rows(A_ub))
        set_(self, "b_ub", as_vector(b_ub))
        set_(self, "A_eq", _rows(A_eq))
        set_(self, "b_eq", as_vector(b_eq))
        set_(self, "lb", tuple(None if v is None else as_vector([v])[0] for v in (lb if lb is not None else [None] * n)))
        set_(self, "ub", tuple(None if v is None else as_vector([v])[0] for v in (ub if ub is not None else [None] * n)))
        self._validate()

    @property
    def n(self) -> int:
        return len(self.objective)

    def _validate(self):
        n = self.n
        if len(self.A_ub) != len(self.b_ub) or len(self.A_eq) != len(self.b_eq):
            raise InputError("constraint rows and right-hand sides differ in length")
        if any(len(r) != n for r in self.A_ub + self.A_eq):
            raise InputError(f"constraint row length differs from {n} variables")
        if len(self.lb) != n or len(self.ub) != n:
            raise InputError("bound vectors must have one entry per variable")
        for lo, hi in zip(self.lb, self.ub):
            if lo is not None and hi is not None and lo > hi:
                raise InputError(f"lower bound {lo} exceeds upper bound {hi}")

    def is_feasible_point(self, x: Sequence) -> bool:
        for r, bi in zip(self.A_ub, self.b_ub):
            if sum(a * v for a, v in zip(r, x)) > bi:
                return False
        for r, bi in zip(self.A_eq, self.b_eq):
            if sum(a * v for a, v in zip(r, x)) != bi:
                return False
        for v, lo, hi in zip(x, self.lb, self.ub):
            if (lo is not None and v < lo) or (hi is not None and v > hi):
                return False
        return True


@dataclass
class LpOutcome:
    status: str
    point: Optional[tuple] = None
    value: Optional[Fraction] = None
    tight_set: tuple = ()
    ray: Optional[tuple] = None

    @property
    def optimal(self) -> bool:
        return self.status == OPTIMAL


# ---------------------------------------------------------------------

class _Tableau:
    def __init__(self, rows, rhs, basis, ncols):
        self.a = rows  # list of lists of Fraction
        self.rhs = rhs
        self.basis = basis
        self.ncols = ncols

    def pivot(self, r, c):
        a = self.a
        pr = a[r]
        pv = pr[c]
        if pv != 1:
            pr[:] = [x / pv for x in pr]
            self.rhs[r] /= pv
        prhs = self.rhs[r]
        nz = [j for j, x in enumerate(pr) if x != 0]
        for i in range(len(a)):
            if i == r:
                continue
            row = a[i]
            f = row[c]
            if f != 0:
                for j in nz:
                    row[j] -= f * pr[j]
                self.rhs[i] -= f * prhs
        self.basis[r] = c

    def run(self, obj, allowed):
        """Maximize ``obj . z``; returns (``'optimal'``, None) or (``'unbounded'``, column)."""
        a = self.a
        while True:
            cb = [obj[b] for b in self.basis]
            entering = None
            for j in allowed:
                if j in self.basis:
                    continue
                rc = obj[j] - sum(c * row[j] for c, row in zip(cb, a) if c != 0 and row[j] != 0)
                if rc > 0:
                    entering = j
                    break
            if entering is None:
                return OPTIMAL, None
            best = None
            for i, row in enumerate(a):
                if row[entering] > 0:
                    ratio = self.rhs[i] / row[entering]
                    key = (ratio, self.basis[i])
                    if best is None or key < best[0]:
                        best = (key, i)
            if best is None:
                return UNBOUNDED, entering
            self.pivot(best[1], entering)


def solve_lp(lp: LinearProgram) -> LpOutcome:
    n = lp.n
    # x = x0 + T z with z >= 0; T is a list of (z-index, coeff) per variable
    x0 = []
    T = []
    nz = 0
    extra_rows = []  # (coeff dict on z, rhs)
    for j in range(n):
        lo, hi = lp.lb[j], lp.ub[j]
        if lo is not None:
            x0.append(Fraction(lo))
            T.append([(nz, 1)])
            if hi is not None:
                extra_rows.append(({nz: 1}, Fraction(hi - lo)))
            nz += 1
        elif hi is not None:
            x0.append(Fraction(hi))
            T.append([(nz, -1)])
            nz += 1
        else:
            x0.append(Fraction(0))
            T.append([(nz, 1), (nz + 1, -1)])
            nz += 2

    def transform(row, rhs):
        coeffs = [Fraction(0)] * nz
        shift = Fraction(rhs)
        for j, aj in enumerate(row):
            if aj == 0:
                continue
            shift -= aj * x0[j]
            for zi, c in T[j]:
                coeffs[zi] += aj * c
        return coeffs, shift

    ineq = [transform(r, bi) for r, bi in zip(lp.A_ub, lp.b_ub)]
    for d, rhs in extra_rows:
        coeffs = [Fraction(0)] * nz
        for zi, c in d.items():
            coeffs[zi] = Fraction(c)
        ineq.append((coeffs, rhs))
    eqs = [transform(r, bi) for r, bi in zip(lp.A_eq, lp.b_eq)]

    n_slack = len(ineq)
    rows, rhs, basis = [], [], []
    art_rows = []
    for i, (coeffs, r) in enumerate(ineq):
        slack = [Fraction(0)] * n_slack
        slack[i] = Fraction(1)
        row = coeffs + slack
        if r < 0:
            row = [-x for x in row]
            r = -r
            art_rows.append(len(rows))
            basis.append(None)
        else:
            basis.append(nz + i)
        rows.append(row)
        rhs.append(r)
    for coeffs, r in eqs:
        row = coeffs + [Fraction(0)] * n_slack
        if r < 0:
            row = [-x for x in row]
            r = -r
        art_rows.append(len(rows))
        basis.append(None)
        rows.append(row)
        rhs.append(r)
    n_real = nz + n_slack
    n_art = len(art_rows)
    for row in rows:
        row.extend([Fraction(0)] * n_art)
    for t, i in enumerate(art_rows):
        rows[i][n_real + t] = Fraction(1)
        basis[i] = n_real + t
    ncols = n_real + n_art
    tab = _Tableau(rows, rhs, basis, ncols)

    if n_art:
        obj1 = [Fraction(0)] * n_real + [Fraction(-1)] * n_art
        tab.run(obj1, range(ncols))
        if sum(tab.rhs[i] for i, b in enumerate(tab.basis) if b >= n_real) != 0:
            return LpOutcome(INFEASIBLE)
        # drive zero-level artificials out of the basis; drop redundant rows
        i = 0
        while i < len(tab.a):
            if tab.basis[i] >= n_real:
                j = next((j for j in range(n_real) if tab.a[i][j] != 0), None)
                if j is None:
                    del tab.a[i], tab.rhs[i], tab.basis[i]
                    continue
                tab.pivot(i, j)
            i += 1

    obj2 = [Fraction(0)] * ncols
    for j in range(n):
        cj = lp.objective[j]
        if cj:
            for zi, c in T[j]:
                obj2[zi] += cj * c
    status, col = tab.run(obj2, range(n_real))

    def to_x(z):
        return as_vector(x0[j] + sum(c * z[zi] for zi, c in T[j]) for j in range(n))

    if status == UNBOUNDED:
        dz = [Fraction(0)] * ncols
        dz[col] = Fraction(1)
        for i, b in enumerate(tab.basis):
            dz[b] = -tab.a[i][col]
        ray = as_vector(sum(c * dz[zi] for zi, c in T[j]) for j in range(n))
        return LpOutcome(UNBOUNDED, ray=ray)

    z = [Fraction(0)] * ncols
    for i, b in enumerate(tab.basis):
        z[b] = tab.rhs[i]
    x = to_x(z)
    value = sum((c * v for c, v in zip(lp.objective, x)), Fraction(0))
    tight = tuple(i for i, (r, bi) in enumerate(zip(lp.A_ub, lp.b_ub)) if sum(a * v for a, v in zip(r, x)) == bi)
    return LpOutcome(OPTIMAL, point=x, value=as_vector([value])[0], tight_set=tight)


def feasible_point(lp: LinearProgram) -> Optional[tuple]:
    """Any point satisfying all constraints of ``lp``, or ``None`` when infeasible."""
    zero = LinearProgram(
        [0] * lp.n, lp.A_ub, lp.b_ub, lp.A_eq, lp.b_eq, lp.lb, lp.ub
    )
    out = solve_lp(zero)
    return out.point if out.optimal else None
