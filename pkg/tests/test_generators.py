import numpy as np
import pytest

from rotfactor.errors import ConfigError, WindowTooSmallError
from rotfactor.generators import (
    BlockSubstitution,
    ExplicitSystem,
    LatticeSystem,
    ProductSystem,
    SubstitutionSystem,
    expand,
    fixed_point_seed,
    return_set,
)
from rotfactor.geometry import Window


def period_doubling():
    return BlockSubstitution(("a", "b"), {"a": list("ab"), "b": list("aa")}, 1)


def test_expand_period_doubling():
    config = expand(period_doubling(), "a", 3)
    assert config.to_text() == "abaaabab"


def test_expand_single_letter():
    sub = BlockSubstitution(("a",), {"a": list("aa")}, 1)
    config = expand(sub, "a", 5)
    assert config.block.shape == (2 ** 5,)


def test_expand_2d_block():
    rule = {
        "a": [list("ab"), list("ba")],
        "b": [list("aa"), list("ab")],
    }
    sub = BlockSubstitution(("a", "b"), rule, 2)
    config = expand(sub, "a", 2)
    assert config.block.shape == (4, 4)
    # top-left 2x2 equals the image of 'a'
    assert config.symbol_at((0, 0)) == "a"
    assert config.symbol_at((0, 1)) == "b"


def test_fixed_point_seed():
    assert fixed_point_seed(period_doubling())[0] == "a"
    swap = BlockSubstitution(("a", "b"), {"a": list("ba"), "b": list("ab")}, 1)
    seed, power = fixed_point_seed(swap)
    assert power == 2
    assert seed in ("a", "b")
    single = BlockSubstitution(("a",), {"a": list("aa")}, 1)
    assert fixed_point_seed(single)[0] == "a"


def test_non_primitive_rejected():
    with pytest.raises(ConfigError):
        BlockSubstitution(("a", "b"), {"a": list("aa"), "b": list("bb")}, 1)


def test_inconsistent_shape_names_symbol():
    rule = {
        "a": [list("ab"), list("ba")],
        "b": [list("aab"), list("aba")],
    }
    with pytest.raises(ConfigError, match="'b'"):
        BlockSubstitution(("a", "b"), rule, 2)


def test_return_set_letter_pattern():
    config = expand(period_doubling(), "a", 3)  # abaaabab
    rs = return_set(config, Window((0,), (0,)))
    assert {p[0] for p in rs.points} == {0, 2, 3, 4, 6}


def test_return_set_whole_config():
    config = expand(period_doubling(), "a", 3)
    rs = return_set(config, config.support())
    assert set(rs.points) == {(0,)}


def test_return_set_window_too_big():
    config = expand(period_doubling(), "a", 2)
    with pytest.raises(WindowTooSmallError):
        return_set(config, Window((0,), (100,)))


def test_lattice_model_levels():
    system = LatticeSystem((2,), size_factor=2)
    sets = system.return_sets(3)
    for n, rs in enumerate(sets):
        step = 2 ** n
        assert all(p[0] % step == 0 for p in rs.points)
        assert (0,) in rs.points
    for a, b in zip(sets, sets[1:]):
        assert set(b.points) <= set(a.points)


def test_substitution_nested_and_zero():
    system = SubstitutionSystem(period_doubling())
    sets = system.return_sets(4)
    for rs in sets:
        assert (0,) * rs.base.dim in rs.points
    for a, b in zip(sets, sets[1:]):
        assert set(b.points) <= set(a.points)


def test_product_equals_product_of_factors():
    pd = period_doubling()
    system = ProductSystem([pd, pd])
    prod_sets = system.return_sets(3)
    factor = SubstitutionSystem(pd, pad=system.pad)
    fac_sets = factor.return_sets(3)
    for n in range(4):
        fac = {p[0] for p in fac_sets[n].points}
        win = prod_sets[n].base.window
        expected = {
            (a, b)
            for a in fac
            for b in fac
            if win.contains((a, b))
        }
        got = set(prod_sets[n].points)
        # the product window is the product of the factor windows, so
        # within it the scan must factor exactly
        assert got == {p for p in expected if win.contains(p)}


def test_product_with_fibonacci_factor():
    pd = period_doubling()
    fib = BlockSubstitution(("a", "b"), {"a": list("ab"), "b": list("a")}, 1)
    system = ProductSystem([fib, pd])
    sets = system.return_sets(2)
    for a, b in zip(sets, sets[1:]):
        assert set(b.points) <= set(a.points)


def test_explicit_system():
    points = [(v,) for v in range(-8, 9)]
    system = ExplicitSystem(points, Window((-8,), (8,)))
    sets = system.return_sets(1)
    assert (0,) in sets[0].points
    with pytest.raises(ConfigError):
        ExplicitSystem([(1,)], Window((0,), (2,)))


def test_supertile_shape_variable_length():
    fib = BlockSubstitution(("a", "b"), {"a": list("ab"), "b": list("a")}, 1)
    # Fibonacci word lengths: 1, 2, 3, 5, 8, 13
    assert [fib.supertile_shape("a", n)[0] for n in range(6)] == [
        1, 2, 3, 5, 8, 13,
    ]


def test_rule_unknown_symbol():
    with pytest.raises(ConfigError, match="unknown"):
        BlockSubstitution(("a",), {"a": list("ax")}, 1)
