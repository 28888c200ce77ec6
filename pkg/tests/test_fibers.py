import numpy as np
import pytest
from hypothesis import given, strategies as st

from shiftframe.errors import GridMismatch, VectorOutsideSubspace
from shiftframe.fibers import (FiberField, FiberWindow, OmegaGrid, RangeFunctionField, apply_translation,
                               helson_project, range_function_from_generators, spectrum_and_length,
                               uniform_frame_check)

GRID = OmegaGrid(1, 8)
WIN = FiberWindow(1, 1)
H = 1.0 / np.sqrt(2.0)


def const(v, grid=GRID, window=WIN):
    return FiberField.constant(grid, window, v)


def test_grid_is_lexicographic():
    g = OmegaGrid(2, 3)
    assert g.size == 9
    np.testing.assert_allclose(g.points[:4], [[0, 0], [0, 1 / 3], [0, 2 / 3], [1 / 3, 0]])


def test_window_indices():
    w = FiberWindow(1, 2)
    assert w.size == 9
    assert w.indices[0].tolist() == [-1, -1] and w.indices[4].tolist() == [0, 0]


def test_bad_fiber_shape():
    with pytest.raises(ValueError):
        FiberField(GRID, WIN, np.zeros((GRID.size, 2)))


def test_single_generator_span():
    J = range_function_from_generators([const([1, 0, 0])])
    assert set(J.dims.tolist()) == {1}
    np.testing.assert_allclose(np.abs(J.bases[0][:, 0]), [1, 0, 0])


def test_zero_generator():
    J = range_function_from_generators([FiberField.zeros(GRID, WIN)])
    assert set(J.dims.tolist()) == {0}
    idx, length = spectrum_and_length(J)
    assert len(idx) == 0 and length == 0


def test_two_generators_span_plane():
    J = range_function_from_generators([const([1, 0, 0]), const([1, 1, 0])])
    assert set(J.dims.tolist()) == {2}


def test_generators_on_different_grids():
    with pytest.raises(GridMismatch):
        range_function_from_generators([const([1, 0, 0]), const([1, 0, 0], OmegaGrid(1, 4))])


def test_spectrum_whole_grid_length_one():
    idx, length = spectrum_and_length(range_function_from_generators([const([0, 1, 0])]))
    assert len(idx) == GRID.size and length == 1


def test_spectrum_mixed_dimension():
    second = np.zeros((GRID.size, 3), complex)
    second[: GRID.size // 2, 1] = 1.0
    J = range_function_from_generators([const([1, 0, 0]), FiberField(GRID, WIN, second)])
    idx, length = spectrum_and_length(J)
    assert length == 2 and len(idx) == GRID.size
    assert J.dims.tolist() == [2] * 4 + [1] * 4


def test_projection_identity_on_subspace():
    J = range_function_from_generators([const([1, 0, 0]), const([0, 1, 0])])
    f = const([0.3, -2j, 0])
    np.testing.assert_allclose(helson_project(f, J).values, f.values, atol=1e-14)


def test_projection_onto_zero_space():
    J = range_function_from_generators([FiberField.zeros(GRID, WIN)])
    assert np.all(helson_project(const([1, 2, 3]), J).values == 0)


def test_projection_rank_one():
    J = range_function_from_generators([const([1, 0, 0])])
    out = helson_project(const([H, H, 0]), J)
    np.testing.assert_allclose(out.values, np.tile([H, 0, 0], (GRID.size, 1)), atol=1e-14)


def test_uniform_frame_orthonormal_basis():
    J = range_function_from_generators([const([1, 0, 0]), const([0, 1, 0])])
    rep = uniform_frame_check([const(J.bases[0][:, 0]), const(J.bases[0][:, 1])], J)
    assert rep.is_frame_generator
    assert rep.bounds.lower == pytest.approx(1) and rep.bounds.upper == pytest.approx(1)


def test_uniform_frame_zero_system():
    J = range_function_from_generators([const([1, 0, 0])])
    rep = uniform_frame_check([FiberField.zeros(GRID, WIN)], J)
    assert rep.bounds.lower == 0.0 and not rep.is_frame_generator


def test_uniform_frame_varying_norm():
    scale = np.where(np.arange(GRID.size) % 2 == 0, np.sqrt(0.5), np.sqrt(2.0))
    phi = FiberField(GRID, WIN, scale[:, None] * np.array([[1.0, 0, 0]]))
    J = range_function_from_generators([phi])
    rep = uniform_frame_check([phi], J)
    assert rep.bounds.lower == pytest.approx(0.5) and rep.bounds.upper == pytest.approx(2.0)
    assert rep.spectrum_size == GRID.size


def test_uniform_frame_skips_off_spectrum():
    vals = np.zeros((GRID.size, 3), complex)
    vals[:3, 0] = 1.0
    phi = FiberField(GRID, WIN, vals)
    rep = uniform_frame_check([phi], range_function_from_generators([phi]))
    assert rep.is_frame_generator and rep.spectrum_size == 3
    assert np.isnan(rep.per_omega[5]).all()


def test_uniform_frame_rejects_escaping_system():
    J = range_function_from_generators([const([1, 0, 0])])
    with pytest.raises(VectorOutsideSubspace):
        uniform_frame_check([const([0, 1, 0])], J)


def test_translation_zero_is_identity():
    f = const([1, 2j, 3])
    np.testing.assert_allclose(apply_translation(f, [0]).values, f.values)


def test_translation_phase_at_half():
    g = OmegaGrid(1, 2)
    f = FiberField.constant(g, WIN, [1, 1, 1])
    out = apply_translation(f, [1])
    np.testing.assert_allclose(out.values[1], [-1, -1, -1], atol=1e-15)


@given(st.integers(-5, 5), st.integers(-5, 5))
def test_translation_preserves_fiber_norms(k0, k1):
    g, w = OmegaGrid(2, 4), FiberWindow(1, 2)
    rng = np.random.default_rng(abs(k0 * 11 + k1))
    f = FiberField(g, w, rng.standard_normal((g.size, w.size)) + 1j * rng.standard_normal((g.size, w.size)))
    out = apply_translation(f, [k0, k1])
    np.testing.assert_allclose(np.linalg.norm(out.values, axis=1), np.linalg.norm(f.values, axis=1))


@given(st.integers(0, 2**32), st.integers(1, 3))
def test_projection_is_idempotent(seed, n_gen):
    rng = np.random.default_rng(seed)
    gens = [FiberField(GRID, WIN, rng.standard_normal((GRID.size, 3))) for _ in range(n_gen)]
    J = range_function_from_generators(gens)
    f = FiberField(GRID, WIN, rng.standard_normal((GRID.size, 3)))
    once = helson_project(f, J)
    np.testing.assert_allclose(helson_project(once, J).values, once.values, atol=1e-12)
    # generators already lie in J
    for g in gens:
        np.testing.assert_allclose(helson_project(g, J).values, g.values, atol=1e-10)


def test_full_range_function():
    J = RangeFunctionField.full(GRID, WIN)
    assert set(J.dims.tolist()) == {3}


@given(st.integers(0, 2**32))
def test_projection_pythagoras(seed):
    rng = np.random.default_rng(seed)
    J = range_function_from_generators([FiberField(GRID, WIN, rng.standard_normal((GRID.size, 3)))])
    f = FiberField(GRID, WIN, rng.standard_normal((GRID.size, 3)) + 1j * rng.standard_normal((GRID.size, 3)))
    pf = helson_project(f, J).values
    lhs = np.sum(np.abs(f.values) ** 2, axis=1)
    rhs = np.sum(np.abs(pf) ** 2, axis=1) + np.sum(np.abs(f.values - pf) ** 2, axis=1)
    np.testing.assert_allclose(lhs, rhs, rtol=1e-10)


@given(st.integers(0, 2**32), st.integers(-4, 4), st.integers(0, 1))
def test_frame_bounds_translation_invariant(seed, k, member):
    rng = np.random.default_rng(seed)
    gens = [FiberField(GRID, WIN, rng.standard_normal((GRID.size, 3)) + 1j * rng.standard_normal((GRID.size, 3)))
            for _ in range(2)]
    J = range_function_from_generators(gens)
    before = uniform_frame_check(gens, J)
    moved = list(gens)
    moved[member] = apply_translation(gens[member], [k])
    after = uniform_frame_check(moved, J)
    assert abs(before.bounds.lower - after.bounds.lower) <= 1e-12 * max(1, before.bounds.lower)
    assert abs(before.bounds.upper - after.bounds.upper) <= 1e-12 * max(1, before.bounds.upper)
