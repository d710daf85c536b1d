import types

import pytest

from rotfactor.errors import InvariantViolation, WindowTooSmallError
from rotfactor.generators import LatticeSystem, ReturnSet
from rotfactor.geometry import PointSet, Window
from rotfactor.hierarchy import (
    address,
    build_combinatorial_data,
    build_level,
    check_well_distributed,
    composite_patch,
    linear_recurrence_report,
    thin_to_well_distributed,
)


def integer_rset(step, level, half=64, dim=1):
    import itertools

    win = Window((-half,) * dim, (half,) * dim)
    pts = frozenset(
        p
        for p in itertools.product(range(-half, half + 1), repeat=dim)
        if all(v % step == 0 for v in p)
    )
    return ReturnSet(
        base=PointSet(pts, win),
        cylinder_window=Window((0,) * dim, (0,) * dim),
        level=level,
    )


def test_partition_z_over_2z():
    level = build_level(integer_rset(1, 0), integer_rset(2, 1))
    for m in sorted(level.complete_owners):
        assert level.partition[m] == (m, (m[0] + 1,))
    assert level.k_n == 1


def test_partition_z2_over_2z2():
    level = build_level(
        integer_rset(1, 0, half=16, dim=2), integer_rset(2, 1, half=16, dim=2)
    )
    for m in sorted(level.complete_owners):
        expected = tuple(
            sorted((m[0] + a, m[1] + b) for a in (0, 1) for b in (0, 1))
        )
        assert level.partition[m] == expected
    assert level.k_n == 1


def test_partition_identical_levels_singletons():
    level = build_level(integer_rset(2, 0), integer_rset(2, 1))
    for m in level.complete_owners:
        assert level.partition[m] == (m,)
    assert level.k_n == 0


def test_owner_subset_enforced():
    with pytest.raises(InvariantViolation):
        build_level(integer_rset(2, 0), integer_rset(3, 1))


def test_composite_patches_lattice(lattice1d_data):
    data = lattice1d_data
    assert composite_patch(data, 2, 2, (0,)) == frozenset({(0,)})
    assert composite_patch(data, 0, 2, (0,)) == frozenset(
        {(0,), (1,), (2,), (3,)}
    )
    assert composite_patch(data, 0, 3, (0,)) == frozenset(
        {(v,) for v in range(8)}
    )


def test_composite_patch_sizes(lattice1d_data):
    for m in range(1, 5):
        patch = composite_patch(lattice1d_data, 0, m, (0,))
        assert len(patch) == 2 ** m


def test_address_examples(lattice1d_data):
    assert address(lattice1d_data, (0,), 0) == (0, [(0,)])
    m0, path = address(lattice1d_data, (5,), 0)
    assert (m0, path) == (3, [(0,), (4,), (4,), (5,)])


def test_address_2d():
    system = LatticeSystem((2, 2), size_factor=2)
    data = build_combinatorial_data(system.return_sets(3))
    m0, path = address(data, (1, 1), 0)
    assert (m0, path) == (1, [(0, 0), (1, 1)])


def test_address_unreachable_raises(lattice1d_data):
    # lex tie-breaking sends boundary ties to the smaller owner, so
    # composite patches of 0 cover the nonnegative side only
    with pytest.raises(WindowTooSmallError):
        address(lattice1d_data, (-1,), 0)


def test_check_well_distributed_lattice(lattice1d_data):
    report = check_well_distributed(lattice1d_data)
    assert report.holds
    assert all(c.holds for c in report.condition_iii)
    assert all(c.holds for c in report.condition_iv)


def test_identical_levels_fail_iii():
    sets = [integer_rset(1, 0), integer_rset(2, 1), integer_rset(2, 2),
            integer_rset(4, 3)]
    data = build_combinatorial_data(sets)
    report = check_well_distributed(data)
    # level 1 = level 2: singleton patches but F_1 nonempty
    failing = {c.n for c in report.condition_iii if not c.holds}
    assert 1 in failing


def test_thinning_identity_on_lattice(lattice1d_data):
    result = thin_to_well_distributed(lattice1d_data)
    assert result.succeeded
    assert result.dropped_labels == []
    assert result.data is lattice1d_data


def test_thinning_drops_defective_middle_level():
    sets = [
        integer_rset(1, 0),
        integer_rset(2, 1),
        integer_rset(2, 2),  # defective: equal to the previous level
        integer_rset(8, 3),
        integer_rset(16, 4),
    ]
    data = build_combinatorial_data(sets)
    result = thin_to_well_distributed(data)
    assert result.succeeded
    assert result.dropped_labels == [2]
    assert result.kept_labels == [0, 1, 3, 4]
    # idempotence: the thinned data passes the check as-is
    assert check_well_distributed(result.data).holds


def test_thinning_period_doubling_best_effort(pd_data):
    # one-sided cylinders never determine an owner's left gap, so no
    # subsequence of length >= 3 satisfies (iv); thinning reports that
    report = check_well_distributed(pd_data)
    assert not report.holds
    result = thin_to_well_distributed(pd_data)
    assert not result.succeeded
    assert "no subsequence" in result.notes


def test_linear_recurrence_flagging(lattice1d_data):
    report = linear_recurrence_report(lattice1d_data)
    assert report.k_values == [1] * 6
    assert report.bound == 1
    assert report.flagged
    growing = types.SimpleNamespace(k_values=[1, 2, 3, 4])
    assert not linear_recurrence_report(growing).flagged


def test_partition_covers_interior(lattice1d_data):
    for level in lattice1d_data.levels:
        # disjoint cover of the assigned interior + postcondition (i)
        seen = {}
        for m, patch in level.partition.items():
            for p in patch:
                assert p not in seen
                seen[p] = m
        next_pts = set(level.next_returns.points)
        for m in level.complete_owners:
            assert set(level.partition[m]) & next_pts == {m}
