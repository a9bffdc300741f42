"""Dense exact matrices over the integers and rationals.

Entries are Python ``int`` or ``fractions.Fraction``; a Fraction with unit
denominator is stored as ``int`` so integrality is a cheap type check.
All objects are immutable and all functions are pure.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import product
from math import gcd
from typing import Iterable, Optional, Sequence

from .errors import InputError


def _norm(x):
    if isinstance(x, bool):
        return int(x)
    if isinstance(x, int):
        return x
    if isinstance(x, Fraction):
        return x.numerator if x.denominator == 1 else x
    if isinstance(x, str):
        return _norm(Fraction(x))
    if isinstance(x, float):
        if not x.is_integer():
            raise InputError(f"float entry {x!r} is not exact; pass a Fraction or a 'p/q' string")
        return int(x)
    raise InputError(f"unsupported matrix entry {x!r}")


def as_vector(v: Iterable) -> tuple:
    return tuple(_norm(x) for x in v)


class Matrix:
    """Immutable dense matrix with exact entries, stored row-major."""

    __slots__ = ("rows", "cols", "data")

    def __init__(self, entries: Sequence[Sequence] = (), cols: Optional[int] = None):
        data = tuple(tuple(_norm(x) for x in row) for row in entries)
        if data:
            width = len(data[0])
            if any(len(r) != width for r in data):
                raise InputError("ragged matrix rows")
            if cols is not None and cols != width:
                raise InputError(f"expected {cols} columns, got {width}")
        else:
            width = cols or 0
        self.rows = len(data)
        self.cols = width
        self.data = data

    # -- constructors -------------------------------------------------
    @classmethod
    def zeros(cls, m: int, n: int) -> "Matrix":
        return cls([[0] * n for _ in range(m)], cols=n)

    @classmethod
    def identity(cls, n: int) -> "Matrix":
        return cls([[int(i == j) for j in range(n)] for i in range(n)], cols=n)

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence], m: int) -> "Matrix":
        if not columns:
            return cls.zeros(m, 0)
        return cls([[c[i] for c in columns] for i in range(m)], cols=len(columns))

    @classmethod
    def row_vector(cls, v: Sequence) -> "Matrix":
        return cls([list(v)], cols=len(v))

    # -- basic protocol -----------------------------------------------
    @property
    def shape(self) -> tuple[int, int]:
        return self.rows, self.cols

    def __getitem__(self, ij):
        i, j = ij
        return self.data[i][j]

    def __eq__(self, other):
        return isinstance(other, Matrix) and self.shape == other.shape and self.data == other.data

    def __hash__(self):
        return hash((self.rows, self.cols, self.data))

    def __repr__(self):
        return f"Matrix({[list(r) for r in self.data]!r}, cols={self.cols})"

    def __str__(self):
        return format_matrix(self)

    def tolist(self) -> list[list]:
        return [list(r) for r in self.data]

    def row(self, i: int) -> tuple:
        return self.data[i]

    def col(self, j: int) -> tuple:
        return tuple(r[j] for r in self.data)

    def columns(self) -> list[tuple]:
        return [self.col(j) for j in range(self.cols)]

    @property
    def T(self) -> "Matrix":
        return Matrix([list(c) for c in zip(*self.data)], cols=self.rows) if self.rows else Matrix.zeros(self.cols, 0)

    def is_integral(self) -> bool:
        return all(isinstance(x, int) for r in self.data for x in r)

    def entries_in(self, allowed) -> bool:
        return all(x in allowed for r in self.data for x in r)

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> "Matrix":
        return Matrix([[self.data[i][j] for j in cols] for i in rows], cols=len(cols))

    def select_cols(self, cols: Sequence[int]) -> "Matrix":
        return self.submatrix(range(self.rows), cols)

    def select_rows(self, rows: Sequence[int]) -> "Matrix":
        return self.submatrix(rows, range(self.cols))

    # -- arithmetic ---------------------------------------------------
    def _check_same(self, other):
        if self.shape != other.shape:
            raise InputError(f"shape mismatch {self.shape} vs {other.shape}")

    def __add__(self, other: "Matrix") -> "Matrix":
        self._check_same(other)
        return Matrix([[a + b for a, b in zip(r, s)] for r, s in zip(self.data, other.data)], cols=self.cols)

    def __sub__(self, other: "Matrix") -> "Matrix":
        self._check_same(other)
        return Matrix([[a - b for a, b in zip(r, s)] for r, s in zip(self.data, other.data)], cols=self.cols)

    def __neg__(self) -> "Matrix":
        return Matrix([[-a for a in r] for r in self.data], cols=self.cols)

    def scale(self, c) -> "Matrix":
        return Matrix([[c * a for a in r] for r in self.data], cols=self.cols)

    def __matmul__(self, other: "Matrix") -> "Matrix":
        if self.cols != other.rows:
            raise InputError(f"cannot multiply {self.shape} by {other.shape}")
        ocols = other.columns()
        return Matrix(
            [[sum(a * b for a, b in zip(r, c)) for c in ocols] for r in self.data],
            cols=other.cols,
        )

    def apply(self, v: Sequence) -> tuple:
        if len(v) != self.cols:
            raise InputError(f"vector of length {len(v)} for matrix with {self.cols} columns")
        return tuple(_norm(sum(a * b for a, b in zip(r, v))) for r in self.data)


def hstack(*ms: Matrix) -> Matrix:
    m = ms[0].rows
    if any(x.rows != m for x in ms):
        raise InputError("hstack row mismatch")
    return Matrix([sum((list(x.data[i]) for x in ms), []) for i in range(m)], cols=sum(x.cols for x in ms))


def vstack(*ms: Matrix) -> Matrix:
    n = ms[0].cols
    if any(x.cols != n for x in ms):
        raise InputError("vstack column mismatch")
    return Matrix([list(r) for x in ms for r in x.data], cols=n)


def block_diag(*ms: Matrix) -> Matrix:
    n = sum(x.cols for x in ms)
    out = []
    off = 0
    for x in ms:
        for r in x.data:
            out.append([0] * off + list(r) + [0] * (n - off - x.cols))
        off += x.cols
    return Matrix(out, cols=n)


# ---------------------------------------------------------------------
# determinants, elimination
# ---------------------------------------------------------------------

def det(M: Matrix) -> int | Fraction:
    """Determinant by fraction-free Bareiss elimination.

    Rational input is scaled to integers first, so the elimination itself
    only ever performs exact integer divisions.
    """
    if M.rows != M.cols:
        raise InputError(f"det of non-square {M.shape} matrix")
    n = M.rows
    if n == 0:
        return 1
    scale = 1
    rows = [list(r) for r in M.data]
    if not M.is_integral():
        for i, r in enumerate(rows):
            lcm = 1
            for x in r:
                if isinstance(x, Fraction):
                    lcm = lcm * x.denominator // gcd(lcm, x.denominator)
            rows[i] = [int(x * lcm) for x in r]
            scale *= lcm
    sign = 1
    prev = 1
    for k in range(n - 1):
        if rows[k][k] == 0:
            for i in range(k + 1, n):
                if rows[i][k] != 0:
                    rows[k], rows[i] = rows[i], rows[k]
                    sign = -sign
                    break
            else:
                return 0
        pk = rows[k][k]
        for i in range(k + 1, n):
            ri = rows[i]
            rik = ri[k]
            rk = rows[k]
            for j in range(k + 1, n):
                ri[j] = (pk * ri[j] - rik * rk[j]) // prev
            ri[k] = 0
        prev = pk
    return _norm(Fraction(sign * rows[n - 1][n - 1], scale))


def det_small(rows: Sequence[Sequence[int]]) -> int:
    """Bareiss determinant on a list-of-rows integer matrix (hot path, no checks)."""
    n = len(rows)
    if n == 0:
        return 1
    if n == 1:
        return rows[0][0]
    if n == 2:
        return rows[0][0] * rows[1][1] - rows[0][1] * rows[1][0]
    a = [list(r) for r in rows]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k] != 0:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        pk = a[k][k]
        rk = a[k]
        for i in range(k + 1, n):
            ri = a[i]
            rik = ri[k]
            for j in range(k + 1, n):
                ri[j] = (pk * ri[j] - rik * rk[j]) // prev
        prev = pk
    return sign * a[n - 1][n - 1]


def rref(M: Matrix) -> tuple[list[list], list[int]]:
    """Reduced row echelon form over Q and the pivot column list.

    Pivots are the first nonzero entries in a row-major scan of the
    remaining submatrix, which makes the result deterministic.
    """
    a = [[Fraction(x) for x in r] for r in M.data]
    m, n = M.rows, M.cols
    pivots = []
    r = 0
    for c in range(n):
        if r == m:
            break
        p = next((i for i in range(r, m) if a[i][c] != 0), None)
        if p is None:
            continue
        a[r], a[p] = a[p], a[r]
        pv = a[r][c]
        a[r] = [x / pv for x in a[r]]
        for i in range(m):
            if i != r and a[i][c] != 0:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
    return a, pivots


def rank(M: Matrix) -> int:
    return len(rref(M)[1])


def independent_columns(M: Matrix) -> list[int]:
    """Leftmost maximal set of linearly independent columns."""
    return rref(M)[1]


def independent_rows(M: Matrix) -> list[int]:
    """Topmost maximal set of linearly independent rows."""
    return rref(M.T)[1]


def kernel_basis(M: Matrix) -> Matrix:
    """Columns spanning ker(M), one per free column of the RREF."""
    a, pivots = rref(M)
    n = M.cols
    free = [j for j in range(n) if j not in pivots]
    cols = []
    for f in free:
        v = [Fraction(0)] * n
        v[f] = Fraction(1)
        for i, p in enumerate(pivots):
            v[p] = -a[i][f]
        cols.append(v)
    return Matrix.from_columns(cols, n)


def solve_linear(M: Matrix, v: Sequence) -> Optional[tuple]:
    """Basic solution of ``M x = v``, or ``None`` when inconsistent.

    Free variables are set to zero.
    """
    if len(v) != M.rows:
        raise InputError(f"rhs length {len(v)} != {M.rows} rows")
    aug = Matrix([list(r) + [x] for r, x in zip(M.data, v)], cols=M.cols + 1)
    a, pivots = rref(aug)
    if M.cols in pivots:
        return None
    x = [Fraction(0)] * M.cols
    for i, p in enumerate(pivots):
        x[p] = a[i][M.cols]
    return as_vector(x)


def inverse(M: Matrix) -> Matrix:
    if M.rows != M.cols:
        raise InputError("inverse of non-square matrix")
    n = M.rows
    a, pivots = rref(hstack(M, Matrix.identity(n)))
    if pivots[:n] != list(range(n)):
        raise InputError("matrix is singular")
    return Matrix([r[n:] for r in a[:n]], cols=n)


# ---------------------------------------------------------------------
# column Hermite normal form
# ---------------------------------------------------------------------

def hnf_columns(W: Matrix) -> tuple[Matrix, Matrix]:
    """Unimodular ``L`` with ``W @ L == [H 0]``, ``H`` lower-triangular Hermite form.

    Only integer column operations (swap, negate, add a multiple) are used,
    applied to the identity in lockstep to produce ``L``.
    """
    if not W.is_integral():
        raise InputError("hnf_columns needs an integer matrix")
    k, n = W.shape
    if rank(W) != k:
        raise InputError("hnf_columns needs full row rank")
    a = [list(r) for r in W.data]
    L = [[int(i == j) for j in range(n)] for i in range(n)]

    def swap(c1, c2):
        for r in a:
            r[c1], r[c2] = r[c2], r[c1]
        for r in L:
            r[c1], r[c2] = r[c2], r[c1]

    def addmul(dst, src, q):
        # column dst -= q * column src
        for r in a:
            r[dst] -= q * r[src]
        for r in L:
            r[dst] -= q * r[src]

    def negate(c):
        for r in a:
            r[c] = -r[c]
        for r in L:
            r[c] = -r[c]

    for i in range(k):
        while True:
            nz = [j for j in range(i, n) if a[i][j] != 0]
            p = min(nz, key=lambda j: (abs(a[i][j]), j))
            if p != i:
                swap(i, p)
            done = True
            for j in range(i + 1, n):
                if a[i][j] != 0:
                    addmul(j, i, a[i][j] // a[i][i])
                    if a[i][j] != 0:
                        done = False
            if done:
                break
        if a[i][i] < 0:
            negate(i)
        d = a[i][i]
        for j in range(i):
            addmul(j, i, a[i][j] // d)
    H = Matrix([r[:k] for r in a], cols=k)
    return Matrix(L, cols=n), H


# ---------------------------------------------------------------------
# text format
# ---------------------------------------------------------------------

def format_entry(x) -> str:
    x = _norm(x)
    if isinstance(x, Fraction):
        return f"{x.numerator}/{x.denominator}"
    return str(x)


def format_matrix(M: Matrix) -> str:
    lines = [f"{M.rows} {M.cols}"]
    # zero-width rows would be blank lines, so an m x 0 matrix is header-only
    if M.cols:
        lines += [" ".join(format_entry(x) for x in r) for r in M.data]
    return "\n".join(lines) + "\n"


def parse_matrix(text: str) -> Matrix:
    """Parse the ``m n`` header plus ``m`` rows text format."""
    lines = [ln for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    M, _ = parse_matrix_lines(lines)
    return M


def parse_matrix_lines(lines: Sequence[str]) -> tuple[Matrix, int]:
    """Parse a matrix from the head of ``lines``; also return lines consumed."""
    if not lines:
        raise InputError("empty matrix text")
    head = lines[0].split()
    if len(head) != 2:
        raise InputError(f"bad matrix header {lines[0]!r}")
    try:
        m, n = int(head[0]), int(head[1])
    except ValueError as exc:
        raise InputError(f"bad matrix header {lines[0]!r}") from exc
    if n == 0 and m >= 0:
        return Matrix.zeros(m, 0), 1
    if m < 0 or n < 0 or len(lines) < 1 + m:
        raise InputError(f"matrix header says {m} rows but only {len(lines) - 1} follow")
    rows = []
    for ln in lines[1 : 1 + m]:
        toks = ln.split()
        if len(toks) != n:
            raise InputError(f"row {ln!r} has {len(toks)} entries, expected {n}")
        try:
            rows.append([Fraction(t) for t in toks])
        except (ValueError, ZeroDivisionError) as exc:
            raise InputError(f"bad entry in row {ln!r}") from exc
    return Matrix(rows, cols=n), 1 + m


def all_pm1_vectors(k: int):
    """Every vector in {0, 1, -1}^k, lexicographic in the order 0 < 1 < -1."""
    return product((0, 1, -1), repeat=k)
