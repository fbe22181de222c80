import math

import pytest

from bowenlyap import IrrationalRotation, NorthSouthCircle, ToralAutomorphism, TorusWithHair

LAM_U = (7 + 3 * math.sqrt(5)) / 2
LAM_S = (7 - 3 * math.sqrt(5)) / 2
LOG_LU = math.log(LAM_U)


@pytest.fixture(scope="session")
def toral():
    return ToralAutomorphism([[2, 3], [3, 5]])


@pytest.fixture(scope="session")
def toral_eigen():
    return ToralAutomorphism([[2, 3], [3, 5]], metric="eigen")


@pytest.fixture(scope="session")
def hair():
    return TorusWithHair(epsilon=0.5)


@pytest.fixture(scope="session")
def north_south():
    return NorthSouthCircle(2.0)


@pytest.fixture(scope="session")
def rotation():
    return IrrationalRotation()
