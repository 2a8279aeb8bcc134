import pytest

from coarsemod.groups import group_from_alias
from coarsemod.rings import ring_from_alias


@pytest.fixture
def z():
    return group_from_alias("Z")


@pytest.fixture
def z2():
    return group_from_alias("Z2")


@pytest.fixture
def f2():
    return group_from_alias("F2")


@pytest.fixture
def bs():
    return group_from_alias("BS(2,3)")


@pytest.fixture
def zz():
    return ring_from_alias("ZZ")


@pytest.fixture
def qq():
    return ring_from_alias("QQ")


@pytest.fixture
def z4():
    return ring_from_alias("Z/4")
