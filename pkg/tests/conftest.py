import math

import numpy as np
import pytest

from fidest import DensityOperator, Purification, purify


def default_prep(rho: DensityOperator) -> Purification:
    """Purify with the smallest useful ancilla register."""
    return purify(rho, max(1, math.ceil(math.log2(max(rho.rank, 2)))))


@pytest.fixture
def prep():
    return default_prep


def pauli_x() -> np.ndarray:
    return np.array([[0, 1], [1, 0]], dtype=complex)
