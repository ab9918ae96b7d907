import pytest

from pcpres import Definition, PcPresentation


@pytest.fixture
def heisenberg():
    """g1, g2 of weight 1 and g3 = [g2, g1] central."""
    return PcPresentation([1, 1, 2], [0, 0, 0], {}, {(1, 0): ((2, 1),)},
                          [Definition("image", (0,)), Definition("image", (1,)),
                           Definition("commutator", (1, 0))])


@pytest.fixture
def quaternion():
    """Q8: g1^2 = g3, g2^2 = g3, [g2, g1] = g3, g3^2 = 1."""
    return PcPresentation([1, 1, 2], [2, 2, 2], {0: ((2, 1),), 1: ((2, 1),)},
                          {(1, 0): ((2, 1),)})


@pytest.fixture
def semidihedral16():
    """SD16 = <r, s | r^8, s^2, r^s = r^3>: g1 = s, g2 = r, g3 = r^2, g4 = r^4."""
    return PcPresentation([1, 1, 2, 3], [2, 2, 2, 2], {1: ((2, 1),), 2: ((3, 1),)},
                          {(1, 0): ((2, 1),), (2, 0): ((3, 1),)})
