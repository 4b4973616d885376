import numpy as np
import pytest

from spincal import algebra


@pytest.fixture(scope="session")
def su21():
    return algebra.build_space(algebra.SpaceSpec.su(2, 1))


@pytest.fixture(scope="session")
def su22():
    return algebra.build_space(algebra.SpaceSpec.su(2, 2))


@pytest.fixture(scope="session")
def su31():
    return algebra.build_space(algebra.SpaceSpec.su(3, 1))


@pytest.fixture(scope="session")
def su32():
    return algebra.build_space(algebra.SpaceSpec.su(3, 2))


@pytest.fixture(scope="session")
def sl2():
    return algebra.build_space(algebra.SpaceSpec.sl(2))


@pytest.fixture(scope="session")
def sl3():
    return algebra.build_space(algebra.SpaceSpec.sl(3))


@pytest.fixture()
def rng():
    return np.random.default_rng(20240817)
