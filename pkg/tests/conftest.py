import numpy as np
import pytest

from circledyn.circle_maps import PowerMap, half_blaschke, pine_tree_blaschke
from circledyn.conjugacy import Conjugacy
from circledyn.markov import validate_partition

CUBE_ROOTS = [0.0, 1 / 3, 2 / 3]
SIXTHS = list(np.arange(6) / 6)


@pytest.fixture(scope="session")
def p_pow2():
    return validate_partition(PowerMap(2), [0.0, 0.5])


@pytest.fixture(scope="session")
def p_pow3():
    return validate_partition(PowerMap(3), CUBE_ROOTS)


@pytest.fixture(scope="session")
def p_b2():
    return validate_partition(half_blaschke(), [0.0, 0.5])


@pytest.fixture(scope="session")
def p_pine():
    return validate_partition(pine_tree_blaschke(), CUBE_ROOTS)


@pytest.fixture(scope="session")
def conj_b2(p_pow2, p_b2):
    return Conjugacy(p_pow2, p_b2)


@pytest.fixture(scope="session")
def conj_pine(p_pow3, p_pine):
    return Conjugacy(p_pow3, p_pine)
