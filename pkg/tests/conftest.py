import pytest

from rotfactor.generators import (
    BlockSubstitution,
    LatticeSystem,
    SubstitutionSystem,
)
from rotfactor.hierarchy import build_combinatorial_data


@pytest.fixture(scope="session")
def lattice1d_data():
    """q=2 lattice model, d=1, levels 0..6 (small, shared)."""
    system = LatticeSystem((2,), size_factor=4)
    return build_combinatorial_data(system.return_sets(6))


@pytest.fixture(scope="session")
def pd_system():
    sub = BlockSubstitution(
        ("a", "b"), {"a": list("ab"), "b": list("aa")}, 1
    )
    return SubstitutionSystem(sub)


@pytest.fixture(scope="session")
def pd_data(pd_system):
    return build_combinatorial_data(pd_system.return_sets(7))


@pytest.fixture(scope="session")
def fib_system():
    sub = BlockSubstitution(
        ("a", "b"), {"a": list("ab"), "b": list("a")}, 1
    )
    return SubstitutionSystem(sub)
