from fractions import Fraction

import pytest

from floerloops.cylinder import CylinderGeometry


@pytest.fixture(scope="session")
def one_fiber():
    return CylinderGeometry(Fraction(1), (Fraction(0),))


@pytest.fixture(scope="session")
def three_fibers():
    return CylinderGeometry(Fraction(1), (Fraction(0), Fraction(1, 3), Fraction(3, 4)))
