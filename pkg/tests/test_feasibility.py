import pytest

from rotfactor.feasibility import MAX_DIM, feasible


def test_trivial_feasible():
    # x <= 5 in 1-d: row (a, b) means a.x <= b
    assert feasible([(1, 5)], [], dim=1)


def test_contradiction():
    # x <= -1 and -x <= -1  (x >= 1)
    assert not feasible([(1, -1), (-1, -1)], [], dim=1)


def test_boundary_touching_closed():
    # x <= 0 and -x <= 0 forces x = 0: feasible (closed systems)
    assert feasible([(1, 0), (-1, 0)], [], dim=1)


def test_equality_substitution():
    # x + y = 1, x <= 0, y <= 0 -> infeasible
    assert not feasible(
        [(1, 0, 0), (0, 1, 0)], [(1, 1, 1)], dim=2
    )
    # x + y = 1, x <= 1, y <= 1 -> feasible
    assert feasible([(1, 0, 1), (0, 1, 1)], [(1, 1, 1)], dim=2)


def test_corner_intersection_2d():
    # the quadrants x,y <= 0 and x,y >= 0 share exactly the origin
    rows = [(1, 0, 0), (0, 1, 0), (-1, 0, 0), (0, -1, 0)]
    assert feasible(rows, [], dim=2)


def test_3d_plane():
    # x + y + z = 0 intersected with the unit box
    rows = []
    for axis in range(3):
        e = [0, 0, 0]
        e[axis] = 1
        rows.append(tuple(e) + (1,))
        rows.append(tuple(-v for v in e) + (1,))
    assert feasible(rows, [(1, 1, 1, 0)], dim=3)


def test_two_equalities():
    # x = y and x = -y force x = y = 0; box keeps it feasible
    eqs = [(1, -1, 0), (1, 1, 0)]
    box = [(1, 0, 1), (-1, 0, 1), (0, 1, 1), (0, -1, 1)]
    assert feasible(box, eqs, dim=2)
    # a box shifted away from 0 (1 <= x <= 2) breaks it
    assert not feasible([(-1, 0, -1), (1, 0, 2)], eqs, dim=2)


def test_dim_cap():
    with pytest.raises(Exception):
        feasible([(1, 0, 0, 0, 5)], [], dim=MAX_DIM + 1)
