import numpy as np
import pytest
from hypothesis import settings

from shiftframe.fibers import FiberField, FiberWindow, OmegaGrid, RangeFunctionField, range_function_from_generators
from shiftframe.operators import RangeOperatorField
from shiftframe.sampling import DSInstance

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")

H = 1.0 / np.sqrt(2.0)


def random_hermitian(rng, n):
    a = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return (a + a.conj().T) / 2


def constant_field_instance(matrix, funcs, gens, radius=1, m=8, iterations=None):
    """Instance with constant generators, operator and functions on a d=1 grid."""
    grid, window = OmegaGrid(1, m), FiberWindow(radius, 1)
    J = range_function_from_generators([FiberField.constant(grid, window, g) for g in gens], grid=grid, window=window)
    Rf = RangeOperatorField(J, np.tile(np.asarray(matrix, complex), (grid.size, 1, 1)))
    fs = [FiberField.constant(grid, window, f) for f in funcs]
    return DSInstance.build(J, Rf, fs, iterations)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def diag_instance():
    """diag(1, -1, 0) on J = span{e_0, e_1}, f = (e_0 + e_1)/sqrt(2)."""
    return constant_field_instance(np.diag([1.0, -1.0, 0.0]), [[H, H, 0]], [[1, 0, 0], [0, 1, 0]])


def full_space(m=8, radius=1):
    grid, window = OmegaGrid(1, m), FiberWindow(radius, 1)
    return RangeFunctionField.full(grid, window)
