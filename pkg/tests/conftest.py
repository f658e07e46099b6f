import pytest

from catalog.builtin import dihedral_group, k_group, rsw_sphere_pair, rsw_stiefel_pair
from core.finite_group import cyclic_group
from core.gamma_hom import builtin_gamma, parse_gamma


@pytest.fixture
def gamma_z():
    return builtin_gamma("Z")


@pytest.fixture
def gamma_z2():
    return parse_gamma("Z^2")


@pytest.fixture
def k1():
    return k_group(1)


@pytest.fixture
def k2():
    return k_group(2)


@pytest.fixture
def sphere_pair():
    return rsw_sphere_pair()


@pytest.fixture
def stiefel_pair():
    return rsw_stiefel_pair()


@pytest.fixture
def d6():
    return dihedral_group(3)


@pytest.fixture
def z3():
    return cyclic_group(3)
