import random
from fractions import Fraction

import numpy as np
import pytest

from crnkit import rational


def test_frac_rejects_floats():
    with pytest.raises(TypeError):
        rational.frac(0.5)


def test_row_reduce_rank_and_pivots():
    red, pivots = rational.row_reduce([[1, 2, 3], [2, 4, 6], [0, 1, 1]])
    assert pivots == (0, 1)
    assert rational.rank([[1, 2, 3], [2, 4, 6], [0, 1, 1]]) == 2


def test_rank_matches_numpy_on_random_integer_matrices():
    rng = random.Random(7)
    for _ in range(60):
        rows = rng.randint(1, 5)
        cols = rng.randint(1, 5)
        mat = [[rng.randint(-4, 4) for _ in range(cols)] for _ in range(rows)]
        expected = np.linalg.matrix_rank(np.array(mat, dtype=float))
        assert rational.rank(mat) == expected


def test_nullspace_vectors_are_in_kernel():
    rows = [[1, 2, 0, -1], [0, 1, 1, 1]]
    basis = rational.nullspace(rows)
    assert len(basis) == 2
    for v in basis:
        for r in rows:
            assert rational.dot(r, v) == 0


def test_solve_linear_consistency():
    assert rational.solve_linear([[2, 0], [0, 3]], [4, 9]) == (Fraction(2), Fraction(3))
    assert rational.solve_linear([[1, 1], [2, 2]], [1, 3]) is None


def test_projection_is_idempotent_and_orthogonal():
    rows = [[1, 1, 0], [0, 1, 1]]
    v = rational.vector([3, -2, 5])
    proj = rational.project_onto_row_span(rows, v)
    assert rational.project_onto_row_span(rows, proj) == proj
    residual = rational.vsub(v, proj)
    for r in rows:
        assert rational.dot(r, residual) == 0


def test_primitive_integer_vector():
    assert rational.primitive_integer_vector([Fraction(1, 2), Fraction(3, 4)]) == (2, 3)
    assert rational.primitive_integer_vector([-2, 4]) == (-1, 2)
    with pytest.raises(ValueError):
        rational.primitive_integer_vector([0, 0])


def test_point_in_hull_triangle():
    tri = [(0, 0), (3, 0), (0, 3)]
    assert rational.point_in_hull(tri, (1, 1))
    assert rational.point_in_hull(tri, (0, 0))
    assert rational.point_in_hull(tri, (Fraction(3, 2), Fraction(3, 2)))  # on the edge
    assert not rational.point_in_hull(tri, (2, 2))
    assert not rational.point_in_hull(tri, (-1, 0))


def test_point_in_hull_degenerate_segment():
    seg = [(0, 0, 0), (2, 2, 2)]
    assert rational.point_in_hull(seg, (1, 1, 1))
    assert not rational.point_in_hull(seg, (1, 1, 0))


def test_point_in_hull_matches_scipy_on_random_clouds():
    # float linear programming as an independent cross-check
    from scipy.optimize import linprog

    rng = random.Random(11)
    for trial in range(40):
        dim = rng.randint(2, 4)
        pts = [tuple(rng.randint(0, 4) for _ in range(dim)) for _ in range(rng.randint(dim + 1, 8))]
        q = tuple(rng.randint(0, 4) for _ in range(dim))
        a_eq = np.vstack([np.array(pts, dtype=float).T, np.ones(len(pts))])
        b_eq = np.array(list(q) + [1.0])
        res = linprog(np.zeros(len(pts)), A_eq=a_eq, b_eq=b_eq, bounds=(0, None), method="highs")
        assert rational.point_in_hull(pts, q) == res.success, (pts, q)
