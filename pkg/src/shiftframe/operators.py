"""Shift-preserving operators as fields of range operators R(omega).

All spectral quantities are computed on the compression Q* R(omega) Q to
the fiber space J(omega), where Q is the stored orthonormal basis.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from . import linalg
from .errors import NotNormal, VectorOutsideSubspace
from .fibers import FIBER_TOL, FiberField, RangeFunctionField, check_same_grid
from .finite import adjoint_eigenspaces

INVARIANCE_TOL = 1e-8
GAP_SENTINEL = math.inf


@dataclass(frozen=True, eq=False)
class RangeOperatorField:
    J: RangeFunctionField
    matrices: np.ndarray = field(repr=False)  # (points, n, n)

    def __post_init__(self):
        m = np.asarray(self.matrices, dtype=complex)
        n = self.J.window.size
        if m.shape != (self.J.grid.size, n, n):
            raise ValueError(f"operator has shape {m.shape}, expected {(self.J.grid.size, n, n)}")
        linalg.check_finite(m)
        object.__setattr__(self, "matrices", m)
        worst = self.invariance_residual()
        if worst > INVARIANCE_TOL:
            raise VectorOutsideSubspace(f"R(omega) does not leave J(omega) invariant (residual {worst:.3g})")

    @property
    def grid(self):
        return self.J.grid

    @property
    def window(self):
        return self.J.window

    def compressed(self, p: int) -> np.ndarray:
        q = self.J.bases[p]
        return q.conj().T @ self.matrices[p] @ q

    def restricted(self, p: int) -> np.ndarray:
        """P_J R P_J in ambient coordinates."""
        q = self.J.bases[p]
        return q @ self.compressed(p) @ q.conj().T

    def invariance_residual(self) -> float:
        worst = 0.0
        for p, q in enumerate(self.J.bases):
            if q.shape[1] == 0:
                continue
            rq = self.matrices[p] @ q
            leak = rq - q @ (q.conj().T @ rq)
            scale = max(1.0, linalg.spectral_norm(rq))
            worst = max(worst, linalg.spectral_norm(leak) / scale)
        return worst

    @cached_property
    def pointwise_norms(self) -> np.ndarray:
        return np.array([linalg.spectral_norm(self.compressed(p)) for p in range(self.grid.size)])


def op_norm(Rf: RangeOperatorField) -> float:
    """ess-sup of ||R(omega)|| on J(omega), as a max over the grid."""
    norms = Rf.pointwise_norms
    return float(norms.max()) if len(norms) else 0.0


def apply_operator(Rf: RangeOperatorField, f: FiberField, fiber_tol: float = FIBER_TOL) -> FiberField:
    check_same_grid(Rf.J, f)
    out = np.einsum("pij,pj->pi", Rf.matrices, f.values)
    for p, q in enumerate(Rf.J.bases):
        v = f.values[p]
        resid = np.linalg.norm(v - q @ (q.conj().T @ v))
        if resid > fiber_tol * max(1.0, np.linalg.norm(v)):
            raise VectorOutsideSubspace(f"grid point {p}: fiber leaves J by {resid:.3g}")
    return FiberField(f.grid, f.window, out)


def adjoint_field(Rf: RangeOperatorField) -> RangeOperatorField:
    adj = np.stack([Rf.restricted(p).conj().T for p in range(Rf.grid.size)]) if Rf.grid.size else Rf.matrices
    return RangeOperatorField(Rf.J, adj)


def normality_residuals(Rf: RangeOperatorField) -> np.ndarray:
    out = np.zeros(Rf.grid.size)
    for p in range(Rf.grid.size):
        c = Rf.compressed(p)
        if c.size:
            out[p] = linalg.commutator_residual(c) / max(1.0, linalg.spectral_norm(c) ** 2)
    return out


def normality_check(Rf: RangeOperatorField, tol: float = linalg.NORMAL_TOL) -> bool:
    return bool(np.all(normality_residuals(Rf) <= tol))


@dataclass(frozen=True, eq=False)
class SDiagonalization:
    """Ordered s-eigenvalue fields with their eigenspace fields.

    ``values[s-1, p]`` is the s-th eigenvalue at grid point p, padded with
    K + s where R(omega) has fewer than s distinct eigenvalues.
    ``eigenbases[s-1][p]`` is an orthonormal basis of that eigenspace in
    ambient coordinates (zero columns when padded).
    """

    J: RangeFunctionField
    values: np.ndarray = field(repr=False)
    counts: np.ndarray = field(repr=False)
    eigenbases: tuple = field(repr=False)
    padding_constant: float
    gap: float
    op_norm: float

    @property
    def r(self) -> int:
        return self.values.shape[0]

    @property
    def spectra(self) -> list[np.ndarray]:
        """sigma(V_{a_s}) for s = 1..r as arrays of grid indices."""
        return [np.flatnonzero(self.counts >= s) for s in range(1, self.r + 1)]

    @property
    def partition(self) -> list[np.ndarray]:
        """B_h for h = 1..r: grid points with exactly h distinct eigenvalues."""
        return [np.flatnonzero(self.counts == h) for h in range(1, self.r + 1)]

    def eigenspace(self, s: int) -> RangeFunctionField:
        """Range function of V_{a_s} (s is 1-based)."""
        return RangeFunctionField(self.J.grid, self.J.window, self.eigenbases[s - 1])

    def projection(self, s: int, p: int) -> np.ndarray:
        return linalg.projector(self.eigenbases[s - 1][p])


def _gap_at(vals) -> float:
    if len(vals) < 2:
        return GAP_SENTINEL
    v = np.asarray(vals)
    d = np.abs(v[:, None] - v[None, :])
    np.fill_diagonal(d, np.inf)
    return float(d.min())


def _assemble(J, per_point_values, per_point_bases, norm) -> SDiagonalization:
    npts, n = J.grid.size, J.window.size
    counts = np.array([len(v) for v in per_point_values], dtype=int)
    r = int(counts.max()) if npts else 0
    k_pad = norm + 1.0
    values = np.empty((r, npts), dtype=complex)
    for s in range(r):
        values[s, :] = k_pad + (s + 1)
    empty = np.zeros((n, 0), dtype=complex)
    bases = [[empty] * npts for _ in range(r)]
    gap = GAP_SENTINEL
    for p, (vals, bs) in enumerate(zip(per_point_values, per_point_bases)):
        for s, (lam, b) in enumerate(zip(vals, bs)):
            values[s, p] = lam
            bases[s][p] = b
        gap = min(gap, _gap_at(vals))
    return SDiagonalization(J, values, counts, tuple(tuple(b) for b in bases), k_pad, gap, norm)


def s_diagonalize(Rf: RangeOperatorField, cluster_tol: float = linalg.CLUSTER_TOL,
                  normal_tol: float = linalg.NORMAL_TOL) -> SDiagonalization:
    """Pointwise clustered spectral decomposition of a normal field, with
    eigenvalues ordered by descending modulus then ascending argument."""
    if not normality_check(Rf, normal_tol):
        raise NotNormal("range operator is not normal at every grid point")
    vals, bases = [], []
    for p, q in enumerate(Rf.J.bases):
        if q.shape[1] == 0:
            vals.append([])
            bases.append([])
            continue
        eig = linalg.normal_eig(Rf.compressed(p), cluster_tol, normal_tol=math.inf)
        vals.append(list(eig.values))
        bases.append([q @ b for b in eig.bases])
    return _assemble(Rf.J, vals, bases, op_norm(Rf))


def adjoint_sdiag(diag: SDiagonalization) -> SDiagonalization:
    """s-diagonalization of L*: conjugated eigenvalue fields, same eigenspaces."""
    return SDiagonalization(diag.J, diag.values.conj(), diag.counts, diag.eigenbases,
                            diag.padding_constant, diag.gap, diag.op_norm)


def adjoint_eigenfields(Rf: RangeOperatorField, cluster_tol: float = linalg.CLUSTER_TOL) -> SDiagonalization:
    """Eigenvalue/eigenspace fields of L* from kernels of R*(omega) - lam I.

    No normality is assumed, so the eigenspaces need not be orthogonal or
    span J(omega); only the necessary-condition check consumes this.
    """
    vals, bases = [], []
    key = linalg.order_key(cluster_tol)
    for p, q in enumerate(Rf.J.bases):
        if q.shape[1] == 0:
            vals.append([])
            bases.append([])
            continue
        pairs = sorted(adjoint_eigenspaces(Rf.compressed(p), cluster_tol), key=lambda t: key(t[0]))
        vals.append([lam for lam, _ in pairs])
        bases.append([q @ b for _, b in pairs])
    return _assemble(Rf.J, vals, bases, op_norm(Rf))


def spectral_gap(diag: SDiagonalization, c_min: float) -> tuple[bool, float]:
    return bool(diag.gap >= c_min), diag.gap


def spectral_reconstruction_residual(Rf: RangeOperatorField, diag: SDiagonalization) -> float:
    worst = 0.0
    n = Rf.window.size
    for p in range(Rf.grid.size):
        acc = np.zeros((n, n), dtype=complex)
        for s in range(int(diag.counts[p])):
            acc += diag.values[s, p] * diag.projection(s + 1, p)
        worst = max(worst, linalg.spectral_norm(Rf.restricted(p) - acc))
    return worst
