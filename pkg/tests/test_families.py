import pytest
from hypothesis import given, settings, strategies as st

from tudim.decomp import affine_tu_dimension, verify_affine, verify_tu
from tudim.errors import InputError
from tudim.exactmat import Matrix
from tudim.families import (
    PARITY3_A,
    PARITY3_DECOMP,
    BigSmallInstance,
    almost_tu_decomp,
    big_small_knapsack,
    block_compose,
    facet_polytope,
    gen_big_small,
    gen_lower_bound_instance,
    gen_master,
    gen_parity,
    gen_powers,
)
from tudim.polytope import integer_hull_vertices, integer_points, vertices
from tudim.reform import verify_wprop

EXAMPLE = BigSmallInstance((4, 4, 4), (7, 12), 3, 12)


def test_printed_parity_certificate():
    assert verify_affine(PARITY3_A, PARITY3_DECOMP)
    assert PARITY3_DECOMP.k == 2


@pytest.mark.parametrize("n", range(1, 7))
def test_gen_parity(n):
    M, D = gen_parity(n)
    assert verify_affine(M.P.A, D)
    assert verify_wprop(M.P, M.W)


def test_gen_parity_projects_to_even_vectors():
    M, _ = gen_parity(3)
    pts = sorted(p[:3] for p in integer_points(M.P))
    assert pts == [(0, 0, 0), (0, 1, 1), (1, 0, 1), (1, 1, 0)]


@pytest.mark.parametrize("n", range(1, 10))
def test_gen_master(n):
    a, tu, aff = gen_master(n)
    A = Matrix([a])
    assert verify_tu(A, tu) and verify_affine(A, aff)
    assert aff.k == tu.k - 1


def test_gen_master_shapes():
    _, tu, aff = gen_master(4)
    assert tu.k == 3 and aff.k == 2
    assert tu.u_mat.row(0) == (1, 2, 2)
    _, tu, _ = gen_master(9)
    assert tu.u_mat.row(0) == (1, 2, 3, 3, 6)


def test_gen_powers_and_lower_bound():
    assert gen_powers(3) == (2, 4, 8)
    P = gen_lower_bound_instance(1)
    assert P.A == Matrix([[2, 2]]) and tuple(P.b) == (3,)
    with pytest.raises(InputError):
        gen_powers(0)


def test_lower_bound_instance_small():
    P = gen_lower_bound_instance(1)
    assert verify_wprop(P, Matrix.identity(2))
    for w in ([0, 0], [1, 0], [0, 1], [1, -1]):
        assert not verify_wprop(P, Matrix([w]))
    # fixing x1 + x2 leaves segments with integral ends
    assert verify_wprop(P, Matrix([[1, 1]]))


def test_big_small_facets():
    facets, M = gen_big_small(EXAMPLE)
    assert len(facets) == 13
    assert sum(f.label.startswith("R =") for f in facets) == 6
    hull = set(integer_hull_vertices(big_small_knapsack(EXAMPLE)).points)
    assert set(vertices(facet_polytope(facets, EXAMPLE.n)).points) == hull
    assert verify_wprop(M.P, M.W)
    assert set(integer_hull_vertices(M.P).points) == hull


@pytest.mark.parametrize(
    "args,msg",
    [
        (((3, 4, 4), (7,), 3, 12), "small weight 1"),
        (((4, 4, 5), (7,), 3, 12), "small weight 3"),
        (((4, 4, 4), (6,), 3, 12), "big weight 1"),
        (((4, 4), (7,), 3, 12), "at least k"),
        (((4, 4, 4), (7,), 2, 12), "k must"),
        (((4, 4, 4), (13,), 3, 12), "big weight 1"),
    ],
)
def test_big_small_windows(args, msg):
    with pytest.raises(InputError, match=msg):
        BigSmallInstance(*args)


@settings(max_examples=5)
@given(
    st.lists(st.integers(31, 40), min_size=3, max_size=4),
    st.lists(st.integers(61, 120), max_size=2),
)
def test_big_small_random(small, big):
    inst = BigSmallInstance(sorted(small), big, 3, 120)
    facets, M = gen_big_small(inst)
    hull = set(integer_hull_vertices(big_small_knapsack(inst)).points)
    assert set(vertices(facet_polytope(facets, inst.n)).points) == hull


def test_block_compose():
    blk = (Matrix([[1, -1]]), Matrix.identity(2))
    A, D = block_compose([blk], [Matrix.identity(2)])
    assert A.rows == 3 and D.k == 2 and verify_affine(A, D)
    A, D = block_compose([blk, blk], [Matrix([[1, 0]]), Matrix([[0, 2]])])
    assert A.shape == (3, 4) and D.k == 4 and verify_affine(A, D)
    with pytest.raises(InputError):
        block_compose([(Matrix([[1, 1]]), Matrix([[1, -1]]))], [Matrix([[1]])])
    with pytest.raises(InputError):
        block_compose([blk], [Matrix([[1]])])


def test_almost_tu_decomp():
    A = Matrix([[1, 1], [-1, 1]])
    D = almost_tu_decomp(A)
    assert D.a_tilde == Matrix([[0, 1], [0, 1]]) and D.w_mat == Matrix([[1, 0]])
    C = Matrix([[1, 1, 0], [0, 1, 1], [1, 0, 1]])
    assert verify_affine(C, almost_tu_decomp(C))
    assert affine_tu_dimension(C).value == 1
    with pytest.raises(InputError):
        almost_tu_decomp(Matrix.identity(2))
