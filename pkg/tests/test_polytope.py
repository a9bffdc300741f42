from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from tudim.errors import BudgetExceeded, InputError, UnboundedError
from tudim.exactmat import Matrix
from tudim.families import PARITY3_A, parity3_polytope
from tudim.linprog import LinearProgram, feasible_point
from tudim.polytope import (
    HPolyhedron,
    contains_in_hull,
    extreme_points,
    idp_check,
    integer_hull_vertices,
    integer_points,
    vertices,
)

from helpers import brute_vertices, tu_matrices

EVEN3 = [(0, 0, 0), (0, 1, 1), (1, 0, 1), (1, 1, 0)]


def lp_extreme_filter(points):
    """Brute-force oracle: keep points that are not in the hull of the others."""
    pts = sorted(set(points))
    out = []
    for i, p in enumerate(pts):
        rest = pts[:i] + pts[i + 1 :]
        N = len(rest)
        if not rest:
            out.append(p)
            continue
        A_eq = [[v[j] for v in rest] for j in range(len(p))] + [[1] * N]
        lp = LinearProgram([0] * N, A_eq=A_eq, b_eq=list(p) + [1], lb=[0] * N)
        if feasible_point(lp) is None:
            out.append(p)
    return out


def test_unit_square_and_triangle():
    sq = HPolyhedron.box([0, 0], [1, 1])
    assert vertices(sq).points == ((0, 0), (0, 1), (1, 0), (1, 1))
    tri = HPolyhedron(Matrix([[1, 1]]), [1], [0, 0])
    assert len(vertices(tri)) == 3
    assert integer_points(sq) == [(0, 0), (0, 1), (1, 0), (1, 1)]


def test_parity_relaxation_vertices_double_enumeration():
    P = parity3_polytope()
    V = vertices(P).points
    assert list(V) == EVEN3
    # all basic feasible solutions, then filtered by the LP oracle
    assert lp_extreme_filter(V) == EVEN3


def test_parity_integer_points_and_hull():
    P = parity3_polytope()
    assert integer_points(P) == EVEN3
    assert list(integer_hull_vertices(P)) == EVEN3


def test_printed_parity_matrix_with_natural_rhs():
    # with rhs (2,0,0,0) the matrix as printed cuts out the origin alone
    P = HPolyhedron(PARITY3_A, (2, 0, 0, 0), (0, 0, 0), (1, 1, 1))
    assert integer_points(P) == [(0, 0, 0)]


def test_empty_polytope():
    P = HPolyhedron(Matrix([[1], [-1]]), [0, -1])
    assert integer_points(P) == []
    assert len(vertices(P)) == 0


def test_unbounded_rejected():
    P = HPolyhedron(Matrix([[-1]]), [0])
    with pytest.raises(UnboundedError) as info:
        vertices(P)
    assert info.value.ray is not None


def test_integer_hull_examples():
    assert list(integer_hull_vertices(HPolyhedron.box([0], [2]))) == [(0,), (2,)]
    knap = HPolyhedron(Matrix([[2, 2]]), [3], [0, 0], [1, 1])
    assert list(integer_hull_vertices(knap)) == [(0, 0), (0, 1), (1, 0)]


def test_contains_in_hull_examples():
    sq = [(0, 0), (0, 1), (1, 0), (1, 1)]
    assert contains_in_hull(sq, (Fraction(1, 2), Fraction(1, 2)))
    assert not contains_in_hull([(0,), (1,)], (2,))
    assert contains_in_hull(EVEN3, (Fraction(1, 2), Fraction(1, 2), 1))
    assert not contains_in_hull(EVEN3, (1, 1, 1))
    with pytest.raises(InputError):
        contains_in_hull(sq, (0, 0, 0))


def test_budget():
    with pytest.raises(BudgetExceeded):
        integer_points(HPolyhedron.box([0] * 3, [9] * 3), limit=100)
    with pytest.raises(BudgetExceeded):
        vertices(HPolyhedron.box([0] * 4, [1] * 4), limit=10)


def test_idp_examples():
    r = idp_check(parity3_polytope(), 2)
    assert not r and r.witness == (1, 1, 1)
    assert idp_check(HPolyhedron.box([0, 0], [1, 1]), 2)
    assert idp_check(HPolyhedron.box([0], [1]), 3)
    with pytest.raises(InputError):
        idp_check(HPolyhedron(Matrix([[2]]), [1], [0], [1]), 2)


def tu_systems(max_vars=3):
    """Random integral polytopes {M x <= b, 0 <= x <= u} with M TU."""
    return st.tuples(
        tu_matrices(3, max_vars).filter(lambda M: M.cols <= max_vars),
        st.lists(st.integers(-1, 2), min_size=3, max_size=3),
        st.lists(st.integers(1, 2), min_size=max_vars + 2, max_size=max_vars + 2),
    ).map(lambda t: HPolyhedron(t[0], t[1][: t[0].rows], [0] * t[0].cols, t[2][: t[0].cols]))


@given(tu_systems())
def test_tu_systems_have_integral_vertices(P):
    for v in vertices(P):
        assert all(isinstance(x, int) for x in v)
    assert set(vertices(P).points) == set(integer_hull_vertices(P).points)


@settings(max_examples=40)
@given(tu_systems(), st.integers(2, 3))
def test_tu_systems_have_idp(P, k):
    if integer_points(P):
        assert idp_check(P, k)


@settings(max_examples=30)
@given(st.lists(st.integers(0, 4), min_size=3, max_size=3))
def test_almost_tu_systems_have_idp(b):
    # the odd cycle is almost TU, hence of affine TU-dimension 1
    A = Matrix([[1, 1, 0], [0, 1, 1], [1, 0, 1]])
    P = HPolyhedron(A, b, [0, 0, 0], [2, 2, 2])
    if not integer_points(P):
        return
    if set(vertices(P).points) != set(integer_hull_vertices(P).points):
        return  # idp_check needs an integral polytope
    assert idp_check(P, 2)


@given(st.lists(st.tuples(st.integers(0, 3), st.integers(0, 3)), min_size=1, max_size=8))
def test_extreme_points_match_oracle(pts):
    assert list(extreme_points(pts)) == lp_extreme_filter(pts)


@given(tu_systems())
def test_every_integer_point_in_hull(P):
    hull = integer_hull_vertices(P).points
    for p in integer_points(P):
        assert contains_in_hull(hull, p)


def test_scaled_and_equalities():
    sq = HPolyhedron.box([0, 0], [1, 1])
    assert vertices(sq.scaled(3)).points == ((0, 0), (0, 3), (3, 0), (3, 3))
    line = sq.with_equalities(Matrix([[1, 1]]), [1])
    assert vertices(line).points == ((0, 1), (1, 0))
    assert integer_points(line) == [(0, 1), (1, 0)]


@settings(max_examples=80)
@given(
    st.integers(1, 3).flatmap(
        lambda n: st.tuples(
            st.lists(st.lists(st.integers(-2, 2), min_size=n, max_size=n), max_size=3),
            st.lists(st.integers(-2, 4), min_size=3, max_size=3),
            st.lists(st.one_of(st.none(), st.integers(-1, 0)), min_size=n, max_size=n),
            st.lists(st.one_of(st.none(), st.integers(1, 2)), min_size=n, max_size=n),
            st.lists(st.integers(-1, 1), min_size=n, max_size=n),
            st.integers(-1, 2),
        )
    )
)
def test_vertices_match_plain_basis_enumeration(data):
    A, b, lb, ub, e, d = data
    n = len(lb)
    P = HPolyhedron(Matrix(A, cols=n), b[: len(A)], lb, ub)
    if any(e):
        P = P.with_equalities(Matrix([e]), [d])
    try:
        got = vertices(P).points
    except UnboundedError:
        return
    assert list(got) == brute_vertices(P)
