"""Independent oracles and strategies shared by the test modules."""

from fractions import Fraction
from itertools import combinations, permutations, product

from hypothesis import strategies as st

from tudim.exactmat import Matrix


def leibniz_det(rows):
    """Permutation-expansion determinant, exact over Fraction."""
    n = len(rows)
    total = Fraction(0)
    for perm in permutations(range(n)):
        inv = sum(1 for i in range(n) for j in range(i + 1, n) if perm[i] > perm[j])
        term = Fraction(-1 if inv % 2 else 1)
        for i in range(n):
            term *= rows[i][perm[i]]
        total += term
    return total


def brute_is_tu(rows):
    """Every square submatrix via the Leibniz oracle."""
    m = len(rows)
    n = len(rows[0]) if rows else 0
    for s in range(1, min(m, n) + 1):
        for rs in combinations(range(m), s):
            for cs in combinations(range(n), s):
                if leibniz_det([[rows[i][j] for j in cs] for i in rs]) not in (0, 1, -1):
                    return False
    return True


def matrices(min_rows=1, max_rows=4, min_cols=1, max_cols=4, lo=-3, hi=3):
    return st.integers(min_rows, max_rows).flatmap(
        lambda m: st.integers(min_cols, max_cols).flatmap(
            lambda n: st.lists(
                st.lists(st.integers(lo, hi), min_size=n, max_size=n), min_size=m, max_size=m
            ).map(lambda rows: Matrix(rows, cols=n))
        )
    )


def unit_matrices(max_rows=5, max_cols=5):
    return matrices(1, max_rows, 1, max_cols, -1, 1)


def network_matrix(arcs, nodes):
    """Node-arc incidence matrix of a digraph: always TU."""
    rows = [[0] * len(arcs) for _ in range(nodes)]
    for j, (u, v) in enumerate(arcs):
        rows[u][j] = 1
        rows[v][j] = -1
    return Matrix(rows, cols=len(arcs))


def tu_matrices(max_nodes=4, max_arcs=4):
    """Random TU matrices: digraph incidence rows, possibly with unit columns appended."""
    def build(args):
        nodes, arcs, extra = args
        M = network_matrix(arcs, nodes)
        rows = [list(r) + [int(i == e) for e in extra] for i, r in enumerate(M.data)]
        return Matrix(rows, cols=M.cols + len(extra))

    return st.integers(2, max_nodes).flatmap(
        lambda n: st.tuples(
            st.just(n),
            st.lists(
                st.tuples(st.integers(0, n - 1), st.integers(0, n - 1)).filter(lambda a: a[0] != a[1]),
                min_size=1,
                max_size=max_arcs,
            ),
            st.lists(st.integers(0, n - 1), max_size=2),
        )
    ).map(build)


def box_points(lo, hi, n):
    return list(product(range(lo, hi + 1), repeat=n))


def brute_vertices(P):
    """Plain basis enumeration: every n-subset of all tight rows, equalities included."""
    from tudim.exactmat import det, solve_linear

    n = P.n
    ineq = P.inequalities()
    eqs = list(zip(P.eq_A.data, P.eq_b))
    rows = ineq + eqs + [(tuple(-x for x in r), -v) for r, v in eqs]
    found = set()
    for S in combinations(range(len(rows)), n):
        M = Matrix([rows[i][0] for i in S], cols=n)
        if det(M) == 0:
            continue
        x = solve_linear(M, [rows[i][1] for i in S])
        if P.contains(x):
            found.add(tuple(x))
    return sorted(found)
