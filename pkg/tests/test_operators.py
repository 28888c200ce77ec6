import numpy as np
import pytest
from hypothesis import given, strategies as st

from shiftframe.errors import NotNormal, VectorOutsideSubspace
from shiftframe.fibers import FiberField, FiberWindow, OmegaGrid, range_function_from_generators
from shiftframe.instances import generate_instance, load_instance, random_spec
from shiftframe.operators import (GAP_SENTINEL, RangeOperatorField, adjoint_field, adjoint_sdiag,
                                  apply_operator, normality_check, op_norm, s_diagonalize, spectral_gap,
                                  spectral_reconstruction_residual)
from conftest import full_space

H = 1.0 / np.sqrt(2.0)


def constant_field(mat, J):
    return RangeOperatorField(J, np.tile(np.asarray(mat, complex), (J.grid.size, 1, 1)))


def plane(m=8):
    grid, window = OmegaGrid(1, m), FiberWindow(1, 1)
    return range_function_from_generators([FiberField.constant(grid, window, [1, 0, 0]),
                                           FiberField.constant(grid, window, [0, 1, 0])])


def line(m=8):
    grid, window = OmegaGrid(1, m), FiberWindow(1, 1)
    return range_function_from_generators([FiberField.constant(grid, window, [1, 0, 0])])


def test_invariance_enforced():
    with pytest.raises(VectorOutsideSubspace):
        constant_field([[0, 0, 0], [1, 0, 0], [0, 0, 0]], line())


def test_op_norm_identity_and_zero():
    assert op_norm(constant_field(np.eye(3), line())) == pytest.approx(1.0)
    assert op_norm(constant_field(np.zeros((3, 3)), line())) == 0.0


def test_op_norm_ignores_complement():
    # entry 7 lives on the orthogonal complement of J and must not count
    assert op_norm(constant_field(np.diag([2.0, 0.5, 7.0]), plane())) == pytest.approx(2.0)


def test_apply_identity_and_scalar():
    J = plane()
    f = FiberField.constant(J.grid, J.window, [H, H, 0])
    np.testing.assert_allclose(apply_operator(constant_field(np.eye(3), J), f).values, f.values)
    a = np.exp(2j * np.pi * J.grid.points[:, 0])
    mats = a[:, None, None] * np.eye(3)[None]
    out = apply_operator(RangeOperatorField(J, mats), f)
    np.testing.assert_allclose(out.values, a[:, None] * f.values)


def test_apply_diag():
    J = plane()
    f = FiberField.constant(J.grid, J.window, [H, H, 0])
    out = apply_operator(constant_field(np.diag([1.0, -1.0, 0.0]), J), f)
    np.testing.assert_allclose(out.values, np.tile([H, -H, 0], (J.grid.size, 1)))


def test_apply_rejects_outside_fiber():
    J = line()
    with pytest.raises(VectorOutsideSubspace):
        apply_operator(constant_field(np.eye(3), J), FiberField.constant(J.grid, J.window, [0, 1, 0]))


def test_adjoint():
    J = full_space()
    herm = constant_field([[1, 2j, 0], [-2j, 0, 0], [0, 0, 3]], J)
    np.testing.assert_allclose(adjoint_field(herm).matrices, herm.matrices)
    ii = constant_field(1j * np.eye(3), J)
    np.testing.assert_allclose(adjoint_field(ii).matrices, -1j * np.tile(np.eye(3), (8, 1, 1)))
    rng = np.random.default_rng(0)
    rf = RangeOperatorField(J, rng.standard_normal((8, 3, 3)) + 1j * rng.standard_normal((8, 3, 3)))
    assert np.max(np.abs(adjoint_field(adjoint_field(rf)).matrices - rf.matrices)) <= 1e-14


def test_normality():
    J = full_space()
    q, _ = np.linalg.qr(np.random.default_rng(3).standard_normal((3, 3)))
    assert normality_check(constant_field(q, J))
    nil = np.zeros((3, 3))
    nil[0, 1] = 1.0
    assert not normality_check(constant_field(nil, J))
    mats = np.tile(np.eye(3, dtype=complex), (8, 1, 1))
    mats[5] = np.array([[1, 1, 0], [0, 1, 0], [0, 0, 1]])
    assert not normality_check(RangeOperatorField(J, mats))
    with pytest.raises(NotNormal):
        s_diagonalize(RangeOperatorField(J, mats))


def test_sdiag_identity_on_line():
    d = s_diagonalize(constant_field(np.eye(3), line()))
    assert d.r == 1
    np.testing.assert_allclose(d.values[0], 1.0)
    assert len(d.partition[0]) == 8
    assert d.gap == GAP_SENTINEL
    assert spectral_gap(d, 0.1) == (True, GAP_SENTINEL)


def test_sdiag_plus_minus_one():
    d = s_diagonalize(constant_field(np.diag([1.0, -1.0, 0.0]), plane()))
    assert d.r == 2
    np.testing.assert_allclose(d.values[0], 1.0)
    np.testing.assert_allclose(d.values[1], -1.0)
    assert len(d.partition[1]) == 8 and len(d.partition[0]) == 0
    assert d.gap == pytest.approx(2.0)
    assert d.padding_constant == pytest.approx(2.0)
    assert spectral_gap(d, 1.0)[0]
    assert spectral_reconstruction_residual(constant_field(np.diag([1.0, -1.0, 0.0]), plane()), d) <= 1e-12


def test_sdiag_half_grid_identity():
    J = plane()
    mats = np.tile(np.diag([1.0, -1.0, 0.0]).astype(complex), (8, 1, 1))
    mats[4:] = np.diag([1.0, 1.0, 0.0])
    rf = RangeOperatorField(J, mats)
    d = s_diagonalize(rf)
    assert d.r == 2
    assert d.partition[0].tolist() == [4, 5, 6, 7]
    assert d.partition[1].tolist() == [0, 1, 2, 3]
    np.testing.assert_allclose(d.values[1, 4:], d.padding_constant + 2)
    assert set(d.spectra[1].tolist()) <= set(d.spectra[0].tolist())
    assert d.eigenspace(2).dims.tolist() == [1] * 4 + [0] * 4
    assert d.eigenspace(1).dims.tolist() == [1] * 4 + [2] * 4


def test_gap_shrinks_with_grid():
    grid, window = OmegaGrid(1, 256), FiberWindow(1, 1)
    J = range_function_from_generators([FiberField.constant(grid, window, [1, 0, 0]),
                                        FiberField.constant(grid, window, [0, 1, 0])])
    mats = np.zeros((256, 3, 3), complex)
    mats[:, 1, 1] = grid.points[:, 0]
    d = s_diagonalize(RangeOperatorField(J, mats))
    passes, c = spectral_gap(d, 0.1)
    assert c == pytest.approx(1 / 256) and not passes


def test_zero_operator_residual():
    rf = constant_field(np.zeros((3, 3)), plane())
    assert spectral_reconstruction_residual(rf, s_diagonalize(rf)) == 0.0


def test_adjoint_sdiag():
    rf = constant_field(np.diag([1.0, -1.0, 0.0]), plane())
    d = s_diagonalize(rf)
    np.testing.assert_allclose(adjoint_sdiag(d).values, d.values)
    di = s_diagonalize(constant_field(1j * np.eye(3), line()))
    adj = adjoint_sdiag(di)
    np.testing.assert_allclose(adj.values, -1j)
    assert adj.eigenbases is di.eigenbases
    np.testing.assert_allclose(adjoint_sdiag(adj).values, di.values)


@given(st.integers(0, 10_000))
def test_sdiag_structure_on_generated_fields(seed):
    inst = load_instance(generate_instance(random_spec(seed, 16))).instance
    d = s_diagonalize(inst.Rf)
    assert spectral_reconstruction_residual(inst.Rf, d) <= 1e-8
    for p in range(inst.J.grid.size):
        h = int(d.counts[p])
        projs = [d.projection(s, p) for s in range(1, h + 1)]
        np.testing.assert_allclose(sum(projs), inst.J.projector(p), atol=1e-10)
        assert np.all(np.abs(d.values[h:, p]) > d.op_norm)
    assert all(set(d.spectra[s + 1]) <= set(d.spectra[s]) for s in range(d.r - 1))
    assert sum(len(b) for b in d.partition) == int((inst.J.dims > 0).sum())


@given(st.integers(0, 2**32))
def test_adjoint_preserves_norm_and_normality(seed):
    rng = np.random.default_rng(seed)
    J = plane()
    mats = np.zeros((8, 3, 3), complex)
    mats[:, :2, :2] = rng.standard_normal((8, 2, 2)) + 1j * rng.standard_normal((8, 2, 2))
    rf = RangeOperatorField(J, mats)
    adj = adjoint_field(rf)
    assert abs(op_norm(adj) - op_norm(rf)) <= 1e-12 * max(1, op_norm(rf))
    assert normality_check(adj) == normality_check(rf)
