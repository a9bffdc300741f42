from fractions import Fraction
from itertools import product

import pytest
from hypothesis import given, strategies as st

from tudim.decomp import (
    AffineTuDecomposition,
    TuDecomposition,
    affine_tu_dimension,
    canonicalize_decomposition,
    canonicalize_identity,
    change_of_variables,
    decide_affine_given_w,
    decide_tu_given_w,
    dedup_columns,
    lift_columns,
    lower_bounds,
    reduce_full_rank,
    tu_dimension,
    verify_affine,
    verify_tu,
)
from tudim.errors import InputError
from tudim.exactmat import Matrix, hstack, vstack
from tudim.families import PARITY3_A, PARITY3_DECOMP
from tudim.tu import is_tu

from helpers import matrices, tu_matrices

MASTER4_W = Matrix([[1, 0, 1, 0], [0, 1, 0, 1], [0, 0, 1, 1]])
A1234 = Matrix([[1, 2, 3, 4]])


# -- verification ------------------------------------------------------

def test_verify_affine_examples():
    assert verify_affine(PARITY3_A, PARITY3_DECOMP)
    T = Matrix([[1, -1, 0], [0, 1, 1]])
    assert verify_affine(T, AffineTuDecomposition(T, Matrix.zeros(2, 0), Matrix.zeros(0, 3)))
    A = Matrix([[5, -7], [2, 9]])
    assert verify_affine(A, AffineTuDecomposition(Matrix.zeros(2, 2), A, Matrix.identity(2)))


def test_verify_affine_diagnoses():
    D = PARITY3_DECOMP
    bad = AffineTuDecomposition(D.a_tilde, D.u_mat, Matrix([[0, 1, 0], [0, 1, 1]]))
    chk = verify_affine(PARITY3_A, bad)
    assert not chk and chk.reason.startswith("product mismatch")
    chk = verify_affine(Matrix([[2]]), AffineTuDecomposition(Matrix([[2]]), Matrix.zeros(1, 0), Matrix.zeros(0, 1)))
    assert not chk and "A_tilde" in chk.reason
    chk = verify_affine(Matrix([[2, 2]]), AffineTuDecomposition(Matrix.zeros(1, 2), Matrix([[1]]), Matrix([[2, 2]])))
    assert not chk and "W" in chk.reason
    chk = verify_affine(Matrix([[1, 1]]), AffineTuDecomposition(Matrix.zeros(1, 2), Matrix([[1]]), Matrix([[1]])))
    assert not chk and chk.reason == "dimension mismatch"
    # [A_tilde; W] = [[1,1],[-1,1]] is not TU
    A = Matrix([[2, 2]])
    chk = verify_affine(A, AffineTuDecomposition(Matrix([[1, 1]]), Matrix([[-1]]), Matrix([[-1, 1]])))
    assert not chk


def test_verify_tu_examples():
    assert verify_tu(A1234, TuDecomposition(Matrix([[1, 2, 2]]), MASTER4_W))
    I = Matrix.identity(3)
    assert verify_tu(I, TuDecomposition(I, I))
    chk = verify_tu(A1234, TuDecomposition(Matrix([[1, 2, 3]]), MASTER4_W))
    assert not chk and chk.reason == "product mismatch at column 3"


# -- normalization -----------------------------------------------------

def test_reduce_full_rank():
    D = PARITY3_DECOMP
    assert reduce_full_rank(PARITY3_A, D) is D
    # duplicate the first W row and split its U column between the copies
    W = vstack(D.w_mat.select_rows([0]), D.w_mat)
    u0 = D.u_mat.col(0)
    U = hstack(Matrix([[x] for x in u0]), Matrix.zeros(4, 1), D.u_mat.select_cols([1]))
    big = AffineTuDecomposition(D.a_tilde, U, W)
    assert verify_affine(PARITY3_A, big)
    red = reduce_full_rank(PARITY3_A, big)
    assert red.k == 2 and verify_affine(PARITY3_A, red)
    # an all-zero W row is dropped
    Z = AffineTuDecomposition(D.a_tilde, hstack(D.u_mat, Matrix([[1]] * 4)), vstack(D.w_mat, Matrix.zeros(1, 3)))
    assert reduce_full_rank(PARITY3_A, Z).k == 2


def test_canonicalize_identity_examples():
    W = hstack(Matrix.identity(2), Matrix([[1], [-1]]))
    T, W2, J = canonicalize_identity(W)
    assert T == Matrix.identity(2) and W2 == W and J == [0, 1]
    T, W2, J = canonicalize_identity(Matrix([[-1, 1]]))
    assert T == Matrix([[-1]]) and W2 == Matrix([[1, -1]])
    T, W2, J = canonicalize_identity(PARITY3_DECOMP.w_mat)
    assert T == Matrix.identity(2) and J == [1, 2]
    with pytest.raises(InputError):
        canonicalize_identity(Matrix([[1, 1], [1, 1]]))


def test_canonicalize_decomposition_keeps_validity():
    W = Matrix([[1, 1, 0], [0, 1, 1]])  # TU, no identity submatrix
    A = Matrix([[1, 3, 2]])
    D = AffineTuDecomposition(Matrix.zeros(1, 3), Matrix([[1, 2]]), W)
    assert verify_affine(A, D)
    out, J = canonicalize_decomposition(A, D)
    assert J == [0, 1]
    assert out.w_mat == Matrix([[1, 0, -1], [0, 1, 1]])
    assert verify_affine(A, out)


# -- decision given W --------------------------------------------------

def test_decide_affine_parity():
    D = decide_affine_given_w(PARITY3_A, PARITY3_DECOMP.w_mat)
    assert D is not None and verify_affine(PARITY3_A, D)
    assert D.u_mat == PARITY3_A.select_cols([1, 2])


def test_decide_affine_powers_never_succeeds():
    A = Matrix([[2, 4, 8]])
    for w, v in product((0, 1, -1), repeat=2):
        W = Matrix([[1, 0, w], [0, 1, v]])
        assert decide_affine_given_w(A, W) is None


@given(tu_matrices(3, 4), st.lists(st.integers(-1, 1), min_size=6, max_size=6))
def test_decide_affine_on_tu_matches_verify(A, w2):
    if A.cols < 2:
        return
    W = Matrix([[1] + w2[: A.cols - 1]])
    D = decide_affine_given_w(A, W)
    N = list(range(1, A.cols))
    stacked = vstack(A.select_cols(N) - A.select_cols([0]) @ W.select_cols(N), W.select_cols(N))
    assert (D is not None) == bool(is_tu(stacked))
    if D is not None:
        assert D.u_mat == A.select_cols([0]) and verify_affine(A, D)


def test_decide_affine_malformed_w():
    with pytest.raises(InputError):
        decide_affine_given_w(A1234, Matrix([[0, 1, 1, 1]]), identity_cols=[0])
    with pytest.raises(InputError):
        decide_affine_given_w(A1234, Matrix([[2, 1, 1, 1]]))


def test_decide_tu_examples():
    D = decide_tu_given_w(A1234, MASTER4_W)
    assert D is not None and D.u_mat == Matrix([[1, 2, 2]])
    W = Matrix([[1, 0, 1], [0, 1, -1]])
    D = decide_tu_given_w(W, W)
    assert D.u_mat == Matrix.identity(2)
    assert decide_tu_given_w(A1234, hstack(Matrix.identity(2), Matrix.identity(2))) is None
    with pytest.raises(InputError):
        decide_tu_given_w(A1234, Matrix([[1, 1, 0, 0], [1, -1, 0, 0]]))


# -- bounds and search -------------------------------------------------

def test_lower_bounds_examples():
    lb = lower_bounds(Matrix([list(range(1, 10))]))
    assert (lb.heller_tu, lb.heller_affine) == (3, 2)
    assert lower_bounds(Matrix([[2, 4, 8]])).heller_tu == 1
    assert lower_bounds(Matrix.identity(3)).rank_bound == 3


def test_dedup_and_lift():
    A = Matrix([[2, 2, 4]])
    Ad, src = dedup_columns(A)
    assert Ad == Matrix([[2, 4]]) and src == [0, 0, 1]
    assert dedup_columns(A1234)[0] == A1234
    rep = affine_tu_dimension(Ad)
    lifted = lift_columns(rep.certificate, src)
    assert verify_affine(A, lifted)


def test_parity_dimension():
    rep = affine_tu_dimension(PARITY3_A)
    assert rep.exact and rep.value == 2
    assert verify_affine(PARITY3_A, rep.certificate)


def test_tu_matrix_has_dimension_zero():
    T = Matrix([[1, -1, 0], [0, 1, -1]])
    rep = affine_tu_dimension(T)
    assert rep.value == 0 and rep.certificate.k == 0


def test_powers_dimension():
    rep = affine_tu_dimension(Matrix([[2, 4, 8]]))
    assert rep.value == 3
    assert all(rep.searched[k] == "exhausted" for k in (0, 1, 2))
    for n, want in ((1, 1), (2, 2)):
        assert affine_tu_dimension(Matrix([[2 ** i for i in range(1, n + 1)]])).value == want


def test_powers_tu_certificates_have_no_unit_u():
    rep = tu_dimension(Matrix([[2, 4, 8]]))
    assert rep.value == 3
    assert all(abs(x) != 1 for x in rep.certificate.u_mat.row(0))


def test_identity_and_master_tu_dimension():
    assert tu_dimension(Matrix.identity(3)).value == 3
    rep = tu_dimension(A1234)
    assert rep.value == 3 and rep.searched[2] == "exhausted"
    assert affine_tu_dimension(A1234).value == 2


def test_master9_tu_dimension_in_range():
    rep = tu_dimension(Matrix([list(range(1, 10))]))
    assert rep.exact and 3 <= rep.value <= 5
    assert verify_tu(Matrix([list(range(1, 10))]), rep.certificate)


def test_budget_degrades_to_lower_bound():
    rep = affine_tu_dimension(Matrix([[2, 4, 8]]), limit=3)
    assert not rep.exact and rep.certificate is None
    assert rep.describe().startswith(">=")


small_rows = matrices(1, 1, 1, 5, -4, 4)


@given(small_rows)
def test_dimension_relations(A):
    aff = affine_tu_dimension(A)
    tu = tu_dimension(A)
    assert (aff.value == 0) == bool(is_tu(A))
    assert aff.value <= tu.value <= aff.value + A.rows
    lb = lower_bounds(A)
    assert tu.value >= max(lb.rank_bound, lb.heller_tu)
    assert aff.value >= lb.heller_affine
    assert aff.value <= A.cols
    assert verify_affine(A, aff.certificate) and verify_tu(A, tu.certificate)


@given(small_rows, st.randoms(use_true_random=False))
def test_affine_dimension_invariances(A, rnd):
    base = affine_tu_dimension(A).value
    cols = list(range(A.cols))
    rnd.shuffle(cols)
    assert affine_tu_dimension(A.select_cols(cols)).value == base
    dup = A.select_cols(list(range(A.cols)) + [rnd.randrange(A.cols)])
    assert affine_tu_dimension(dup).value == base
    j = rnd.randrange(A.cols)
    neg = Matrix([[-x if c == j else x for c, x in enumerate(r)] for r in A.data])
    assert affine_tu_dimension(neg).value == base


# -- change of variables -----------------------------------------------

def test_change_of_variables_identity():
    W = hstack(Matrix.identity(2), Matrix.zeros(2, 1))
    L, AL, cL = change_of_variables(W, Matrix.identity(3), (1, 2, 3))
    assert L == Matrix.identity(3) and cL == (1, 2, 3)


def test_change_of_variables_brute_force():
    W = Matrix([[1, 1]])
    A = Matrix.identity(2)
    c = (1, 0)
    L, AL, cL = change_of_variables(W, A, c)
    assert L == Matrix([[1, -1], [0, 1]])
    # max c.x over {A x <= (1,1), x >= -2, W x integral} vs the y-model
    b = (1, 1)
    grid = [Fraction(i, 2) for i in range(-8, 5)]
    best_x = max(
        sum(ci * xi for ci, xi in zip(c, x))
        for x in product(grid, repeat=2)
        if all(v >= -2 for v in x) and (x[0] + x[1]).denominator == 1 and all(v <= bi for v, bi in zip(A.apply(x), b))
    )
    best_y = max(
        sum(ci * yi for ci, yi in zip(cL, y))
        for y in product(grid, repeat=2)
        if y[0].denominator == 1
        and all(v >= -2 for v in L.apply(y))
        and all(v <= bi for v, bi in zip(AL.apply(y), b))
    )
    assert best_x == best_y == 1


def test_change_of_variables_parity():
    W = Matrix([[0, 0, 0, 1]])
    L, _, _ = change_of_variables(W, Matrix.zeros(0, 4), (0, 0, 0, 0))
    assert (W @ L).row(0) == (1, 0, 0, 0)
    assert sorted(map(abs, sum(L.data, ()))).count(1) == 4


def test_change_of_variables_rejects_non_unimodular():
    with pytest.raises(InputError):
        change_of_variables(Matrix([[2, 0]]), Matrix.zeros(0, 2), (0, 0))
