import itertools
from fractions import Fraction

import pytest

from rotfactor.bruteforce import brute_f_distance
from rotfactor.errors import NotGeneratedError, WindowTooSmallError
from rotfactor.geometry import (
    FirstReturnSet,
    PointSet,
    Window,
    f_diameter,
    f_distance,
    first_return_vectors,
    packing_covering_radii,
    voronoi_neighbors,
)


def full_lattice(half, dim, step=1):
    pts = frozenset(
        itertools.product(*(range(-half, half + 1, step),) * dim)
    )
    win = Window((-half,) * dim, (half,) * dim)
    return PointSet(pts, win)


def test_radii_unit_square_lattice():
    ps = full_lattice(5, 2)
    radii = packing_covering_radii(ps)
    assert radii.r == 0.5
    assert radii.r_sq == Fraction(1, 4)
    assert radii.R_sq == Fraction(1, 2)  # R = sqrt(2)/2


def test_radii_spacing_two():
    ps = full_lattice(10, 1, step=2)
    radii = packing_covering_radii(ps)
    assert radii.r == 1.0
    assert radii.R == 1.0


def test_radii_window_too_small():
    ps = PointSet(frozenset({(0,)}), Window((-1,), (1,)))
    with pytest.raises(WindowTooSmallError):
        packing_covering_radii(ps)


@pytest.mark.parametrize("dim", [1, 2, 3])
def test_unit_lattice_neighbors(dim):
    ps = full_lattice(5, dim)
    F = first_return_vectors(ps)
    expected = set(itertools.product((-1, 0, 1), repeat=dim))
    expected.discard((0,) * dim)
    assert set(F.vectors) == expected


def test_neighbor_graph_symmetric_and_subwindow_consistent():
    ps_small = full_lattice(4, 2)
    ps_big = full_lattice(6, 2)
    g_small = voronoi_neighbors(ps_small)
    g_big = voronoi_neighbors(ps_big)
    both = g_small.eligible & g_big.eligible
    pairs_small = {
        p for p in g_small.pairs if p[0] in both and p[1] in both
    }
    pairs_big = {
        p for p in g_big.pairs if p[0] in both and p[1] in both
    }
    assert pairs_small == pairs_big


def test_first_return_set_validation():
    with pytest.raises(ValueError):
        FirstReturnSet(frozenset({(0,)}))
    with pytest.raises(ValueError):
        FirstReturnSet(frozenset({(1,)}))  # not symmetric
    FirstReturnSet(frozenset({(1,), (-1,)}))


def test_f_distance_examples():
    F = FirstReturnSet(frozenset({(1,), (-1,), (2,), (-2,)}))
    assert f_distance((0,), F) == 0
    assert f_distance((3,), F) == 2
    assert f_distance((-3,), F) == 2


def test_f_distance_not_generated():
    F = FirstReturnSet(frozenset({(2,), (-2,)}))
    with pytest.raises(NotGeneratedError):
        f_distance((3,), F)


def test_f_distance_matches_plain_bfs():
    import random

    F = FirstReturnSet(
        frozenset({(1, 0), (-1, 0), (0, 1), (0, -1), (2, 1), (-2, -1)})
    )
    rng = random.Random(7)
    for _ in range(50):
        u = (rng.randint(-6, 6), rng.randint(-6, 6))
        want = brute_f_distance(u, F)
        if want is None:
            continue
        assert f_distance(u, F) == want


def test_f_diameter():
    F = FirstReturnSet(frozenset({(1,), (-1,)}))
    assert f_diameter([(0,), (1,), (2,)], F) == 2
    F2 = FirstReturnSet(
        frozenset(
            v
            for v in itertools.product((-1, 0, 1), repeat=2)
            if v != (0, 0)
        )
    )
    assert f_diameter([(0, 0), (1, 0), (0, 1), (1, 1)], F2) == 1
    assert f_diameter([(3, 4)], F2) == 0


def test_window_validation():
    with pytest.raises(ValueError):
        Window((0,), (-1,))
    with pytest.raises(ValueError):
        Window((0, 0), (1,))
    w = Window((-2, -2), (2, 2))
    assert w.boundary_distance((0, 1)) == 1
    assert w.erode(1).lo == (-1, -1)
    with pytest.raises(WindowTooSmallError):
        w.erode(3)
