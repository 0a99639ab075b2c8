import numpy as np
import pytest

from nppsim.linalg import DiagonalOp, StateVector, apply_diagonal_phase, apply_x_rotations


@pytest.fixture(scope="session", autouse=True)
def warm_kernels():
    """Trigger kernel JIT once so per-test timings stay honest."""
    state = StateVector.plus_state(2)
    apply_diagonal_phase(state, DiagonalOp(2, np.zeros(4)), 0.1)
    apply_x_rotations(state, np.array([0.1, 0.2]))
