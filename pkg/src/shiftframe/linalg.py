"""Dense complex linear algebra used throughout the package.

Everything here works on plain ``numpy`` arrays.  Matrices are small
(n <= ~64) so no attempt is made at structured or batched storage.
"""

from __future__ import annotations

import cmath
import functools
import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .errors import DegenerateClustering, NonFinite, NotNormal

CLUSTER_TOL = 1e-8
RANK_TOL = 1e-10
NORMAL_TOL = 1e-10

_TWO_PI = 2.0 * math.pi


def as_matrix(m) -> np.ndarray:
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2:
        raise ValueError(f"expected a 2-d array, got shape {a.shape}")
    check_finite(a)
    return a


def check_finite(a: np.ndarray) -> None:
    if not np.all(np.isfinite(a)):
        raise NonFinite("input contains NaN or Inf")


def spectral_norm(m: np.ndarray) -> float:
    if m.size == 0:
        return 0.0
    return float(np.linalg.norm(m, 2))


def singular_values(m) -> np.ndarray:
    """Singular values in descending order (length ``min(rows, cols)``)."""
    a = as_matrix(m)
    if a.size == 0:
        return np.zeros(min(a.shape))
    return np.linalg.svd(a, compute_uv=False)


def numerical_rank(sigma: np.ndarray, rank_tol: float = RANK_TOL) -> int:
    """Count singular values above ``rank_tol * max(sigma_max, 1)``.

    The floor at 1 keeps vectors that are zero up to roundoff (e.g. a
    projection that should vanish) from registering as rank one.
    """
    if len(sigma) == 0:
        return 0
    threshold = rank_tol * max(float(sigma[0]), 1.0)
    return int(np.count_nonzero(sigma > threshold))


def orthonormal_span(columns, rank_tol: float = RANK_TOL, length: int | None = None):
    """Orthonormal basis of the numerical span of ``columns``.

    ``columns`` is a sequence of equal-length vectors or an ``(n, k)``
    array whose columns are the vectors.  Returns ``(basis, rank)`` where
    ``basis`` has shape ``(n, rank)``.
    """
    if isinstance(columns, np.ndarray) and columns.ndim == 2:
        a = columns.astype(complex, copy=False)
    else:
        cols = [np.asarray(c, dtype=complex).ravel() for c in columns]
        if not cols:
            n = 0 if length is None else length
            return np.zeros((n, 0), dtype=complex), 0
        sizes = {c.shape[0] for c in cols}
        if len(sizes) != 1:
            raise ValueError("vectors have different lengths")
        a = np.stack(cols, axis=1)
    check_finite(a)
    if a.shape[1] == 0:
        return np.zeros((a.shape[0], 0), dtype=complex), 0
    u, s, _ = np.linalg.svd(a, full_matrices=False)
    rank = numerical_rank(s, rank_tol)
    return u[:, :rank].copy(), rank


def projector(basis: np.ndarray) -> np.ndarray:
    """Orthogonal projection onto the span of an orthonormal basis."""
    return basis @ basis.conj().T


def commutator_residual(m: np.ndarray) -> float:
    mh = m.conj().T
    return spectral_norm(m @ mh - mh @ m)


def is_normal(m: np.ndarray, tol: float = NORMAL_TOL) -> bool:
    return commutator_residual(m) <= tol * max(1.0, spectral_norm(m) ** 2)


# --- eigenvalue clustering and ordering -------------------------------------


def _canonical_arg(z: complex, tol: float) -> float:
    a = cmath.phase(z) % _TWO_PI
    if _TWO_PI - a <= tol:
        a = 0.0
    return a


def order_key(tol: float = CLUSTER_TOL):
    """Sort key for the fixed total order on C: descending modulus, then
    ascending argument in [0, 2pi); moduli within ``tol`` count as equal."""

    def cmp(x: complex, y: complex) -> int:
        ax, ay = abs(x), abs(y)
        if abs(ax - ay) > tol:
            return -1 if ax > ay else 1
        px = _canonical_arg(x, tol) if ax > tol else 0.0
        py = _canonical_arg(y, tol) if ay > tol else 0.0
        if px == py:
            return 0
        return -1 if px < py else 1

    return functools.cmp_to_key(cmp)


def cluster_values(values, tol: float = CLUSTER_TOL) -> list[list[int]]:
    """Single-linkage clusters of complex numbers at distance ``<= tol``.

    Clusters come back in the fixed total order of their mean values.
    Raises DegenerateClustering when chaining produces a cluster whose
    diameter exceeds ``tol``, since the grouping is then ambiguous.
    """
    z = np.asarray(values, dtype=complex).ravel()
    n = len(z)
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(n):
        for j in range(i + 1, n):
            if abs(z[i] - z[j]) <= tol:
                parent[find(i)] = find(j)
    groups: dict[int, list[int]] = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    clusters = list(groups.values())
    for c in clusters:
        if len(c) > 2:
            pts = z[c]
            diam = np.max(np.abs(pts[:, None] - pts[None, :]))
            if diam > tol:
                raise DegenerateClustering(
                    f"eigenvalue cluster of diameter {diam:.3g} exceeds tolerance {tol:.3g}"
                )
    key = order_key(tol)
    clusters.sort(key=lambda c: key(complex(np.mean(z[c]))))
    return clusters


@dataclass(frozen=True)
class EigenDecomposition:
    """Spectral decomposition of a normal matrix.

    ``values[s]`` is the mean of the raw eigenvalues in cluster ``s`` and
    ``bases[s]`` an orthonormal basis (columns) of its eigenspace.
    """

    eigenvalues: np.ndarray
    values: np.ndarray
    bases: list = field(repr=False)
    clusters: list

    @property
    def projections(self) -> list[np.ndarray]:
        return [projector(b) for b in self.bases]

    def __len__(self) -> int:
        return len(self.values)

    def reconstruct(self) -> np.ndarray:
        n = self.eigenvalues.shape[0]
        out = np.zeros((n, n), dtype=complex)
        for lam, p in zip(self.values, self.projections):
            out += lam * p
        return out


def normal_eig(m, cluster_tol: float = CLUSTER_TOL, normal_tol: float = NORMAL_TOL) -> EigenDecomposition:
    """Clustered eigendecomposition of a normal matrix via complex Schur form."""
    a = as_matrix(m)
    if a.shape[0] != a.shape[1]:
        raise ValueError(f"matrix must be square, got {a.shape}")
    n = a.shape[0]
    if n == 0:
        return EigenDecomposition(np.zeros(0, complex), np.zeros(0, complex), [], [])
    resid = commutator_residual(a)
    scale = max(1.0, spectral_norm(a) ** 2)
    if resid > normal_tol * scale:
        raise NotNormal(f"commutator residual {resid:.3g} exceeds {normal_tol:.1g} * {scale:.3g}")
    t, z = scipy.linalg.schur(a, output="complex")
    eigs = np.diag(t).copy()
    clusters = cluster_values(eigs, cluster_tol)
    values = np.array([np.mean(eigs[c]) for c in clusters], dtype=complex)
    bases = [z[:, c] for c in clusters]
    return EigenDecomposition(eigs, values, bases, clusters)


def kernel_basis(m: np.ndarray, tol: float) -> np.ndarray:
    """Orthonormal basis of the numerical kernel: right singular vectors with
    singular value ``<= tol * max(1, ||m||)``."""
    n = m.shape[1]
    if n == 0:
        return np.zeros((0, 0), dtype=complex)
    _, s, vh = np.linalg.svd(m)
    s_full = np.zeros(n)
    s_full[: len(s)] = s
    scale = max(1.0, float(s[0]) if len(s) else 0.0)
    null = s_full <= tol * scale
    return vh.conj().T[:, null].copy()
