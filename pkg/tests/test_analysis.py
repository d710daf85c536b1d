import math
from fractions import Fraction

import pytest

from rotfactor.analysis import (
    LengthSeries,
    ThetaLength,
    continuity_modulus,
    factor_map_eval,
    length_series,
    necessary_condition_check,
    series_verdict,
    sufficient_condition_check,
    theta_length,
    theta_scan,
)
from rotfactor.errors import WindowTooSmallError
from rotfactor.geometry import FirstReturnSet


def F_of(*vs):
    vectors = set()
    for v in vs:
        vectors.add(v)
        vectors.add(tuple(-c for c in v))
    return FirstReturnSet(frozenset(vectors))


def test_theta_length_examples():
    assert theta_length(F_of((2,)), (Fraction(1, 4),), 1).value_sq == Fraction(1, 4)
    assert theta_length(F_of((1,), (2,)), (Fraction(1, 3),), 1).value_sq == Fraction(1, 9)
    assert theta_length(F_of((1,), (5,)), (Fraction(0),), 1).value == 0.0


def test_theta_length_monotone_in_F():
    theta = (Fraction(1, 7),)
    small = theta_length(F_of((1,)), theta, 1).value
    big = theta_length(F_of((1,), (3,)), theta, 1).value
    assert small <= big


def synthetic_series(values, k=1, theta=(Fraction(1, 2),)):
    lengths = [
        ThetaLength(
            value=float(v),
            value_sq=Fraction(v) ** 2 if isinstance(v, (int, Fraction)) else v * v,
            witness=(1,),
            exact=isinstance(v, (int, Fraction)),
        )
        for v in values
    ]
    return LengthSeries(
        k=k, theta=theta, level_labels=list(range(len(values))), lengths=lengths
    )


def test_verdict_exact_zero_tail():
    s = synthetic_series(
        [Fraction(1, 4), Fraction(1, 2), 0, 0, 0, 0]
    )
    v = series_verdict(s)
    assert v.classification == "ConvergentEvidence"
    assert v.tail_bound == 0.0


def test_verdict_geometric():
    s = synthetic_series([Fraction(1, 2 ** n) for n in range(10)])
    v = series_verdict(s)
    assert v.classification == "ConvergentEvidence"
    assert v.rate == pytest.approx(0.5, abs=0.05)


def test_verdict_constant_divergent():
    s = synthetic_series([Fraction(1, 3)] * 8)
    v = series_verdict(s)
    assert v.classification == "DivergentEvidence"


def test_verdict_needs_levels():
    with pytest.raises(WindowTooSmallError):
        series_verdict(synthetic_series([Fraction(1, 3)] * 3))


def test_length_series_lattice(lattice1d_data):
    series = length_series(lattice1d_data, (Fraction(1, 4),), 1)
    sums = series.partial_sums_sq_exact()
    assert sums is not None
    assert sums[-1] == Fraction(3, 4)
    values = [l.value_sq for l in series.lengths]
    assert values[0] == Fraction(1, 16)
    assert values[1] == Fraction(1, 4)
    assert all(v == 0 for v in values[2:])

    thirds = length_series(lattice1d_data, (Fraction(1, 3),), 1)
    assert all(l.value_sq == Fraction(1, 9) for l in thirds.lengths)


def test_length_series_zero_theta(lattice1d_data):
    series = length_series(lattice1d_data, (Fraction(0),), 1)
    assert all(l.value == 0 for l in series.lengths)


def test_necessary_condition(lattice1d_data):
    ruled = necessary_condition_check(lattice1d_data, (Fraction(1, 3),), 1)
    assert ruled.conclusion == "extension ruled out at this scale"
    assert not ruled.conditional

    kept = necessary_condition_check(lattice1d_data, (Fraction(1, 4),), 1)
    assert kept.conclusion == "not ruled out"

    trivial = necessary_condition_check(lattice1d_data, (Fraction(0),), 1)
    assert trivial.conclusion == "not ruled out"


def test_sufficient_condition(lattice1d_data):
    rep = sufficient_condition_check(lattice1d_data, (Fraction(1, 4),), 1)
    assert rep.conclusion == "extension indicated"
    assert rep.diagnostics.lr_bound_table[2] == 0.0
    assert rep.diagnostics.epsilon_table[2] == 0.0

    rep3 = sufficient_condition_check(lattice1d_data, (Fraction(1, 3),), 1)
    assert rep3.conclusion == "not indicated"

    rep0 = sufficient_condition_check(lattice1d_data, (Fraction(0),), 1)
    assert rep0.conclusion == "extension indicated"
    assert all(v == 0 for v in rep0.diagnostics.lr_bound_table.values())


def test_factor_map_eval():
    assert factor_map_eval((Fraction(1, 4),), (0,), 1).is_zero()
    assert factor_map_eval((Fraction(1, 4),), (3,), 1).components == (
        Fraction(3, 4),
    )
    assert factor_map_eval(
        (Fraction(1, 3), Fraction(1, 2)), (1, 1), 2
    ).components == (Fraction(1, 3), Fraction(1, 2))


def test_continuity_modulus(lattice1d_data):
    v, sub = continuity_modulus(lattice1d_data, (Fraction(1, 4),), 1, 2)
    assert v == 0.0
    for level in (0, 1, 2):
        v, _ = continuity_modulus(lattice1d_data, (Fraction(1, 3),), 1, level)
        assert v == pytest.approx(1 / 3)


def test_continuity_modulus_at_least_length(lattice1d_data):
    theta = (Fraction(1, 5),)
    for level in (0, 1):
        eps, _ = continuity_modulus(lattice1d_data, theta, 1, level)
        l = theta_length(
            lattice1d_data.levels[level].first_returns, theta, 1
        ).value
        assert eps >= l - 1e-12


def test_theta_scan_lattice(lattice1d_data):
    cands = theta_scan(lattice1d_data, k=1, qmax=8, expansion_base=(2,))
    assert cands[0].theta == (Fraction(0),)
    assert cands[0].score == 0.0
    rank = {c.theta[0]: i for i, c in enumerate(cands)}
    for good in (Fraction(0), Fraction(1, 2), Fraction(1, 4), Fraction(1, 8)):
        for bad in (Fraction(1, 3), Fraction(1, 5)):
            assert rank[good] < rank[bad]


def test_sqrt_d_comparison_inequality(lattice1d_data):
    # l^1 <= sqrt(d) * l^d at every level (d = 1: equality of definitions)
    s1 = length_series(lattice1d_data, (Fraction(1, 3),), 1)
    sd = length_series(lattice1d_data, (Fraction(1, 3),), 1)
    for a, b in zip(s1.lengths, sd.lengths):
        assert a.value_sq <= 1 * b.value_sq
