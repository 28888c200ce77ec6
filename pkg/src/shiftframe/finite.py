"""Finite-dimensional dynamical sampling: iterate systems {R^j f_i}, their
eigenspace projections, and explicit frame-bound estimates in both
directions.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb

import numpy as np

from . import linalg
from .errors import DegenerateEigenvalues, InvalidBounds, VectorOutsideSubspace

KERNEL_TOL = 1e-8
SUBSPACE_TOL = 1e-10


@dataclass(frozen=True)
class FrameBounds:
    lower: float
    upper: float
    is_frame: bool

    def as_dict(self) -> dict:
        return {"lower": self.lower, "upper": self.upper, "is_frame": self.is_frame}


@dataclass(frozen=True)
class IterateSystem:
    operator: np.ndarray
    vectors: tuple
    iterations: int

    @classmethod
    def build(cls, operator, vectors, iterations: int | None = None) -> "IterateSystem":
        r = linalg.as_matrix(operator)
        if r.shape[0] != r.shape[1]:
            raise ValueError(f"operator must be square, got {r.shape}")
        vecs = tuple(np.asarray(v, dtype=complex).ravel() for v in vectors)
        for v in vecs:
            if v.shape[0] != r.shape[0]:
                raise ValueError("vector length does not match operator size")
            linalg.check_finite(v)
        k = r.shape[0] - 1 if iterations is None else int(iterations)
        if k < 0:
            raise ValueError("iteration count must be >= 0")
        return cls(r, vecs, k)

    @property
    def dim(self) -> int:
        return self.operator.shape[0]


def frame_bounds_oracle(vectors, subspace_basis=None, rank_tol: float = linalg.RANK_TOL,
                        subspace_tol: float = SUBSPACE_TOL) -> FrameBounds:
    """Optimal frame bounds of ``vectors`` in the span of ``subspace_basis``
    (the whole space when omitted), read off the synthesis matrix's
    singular values."""
    if isinstance(vectors, np.ndarray) and vectors.ndim == 2:
        v = vectors.astype(complex, copy=False)
    else:
        vecs = [np.asarray(x, dtype=complex).ravel() for x in vectors]
        n = subspace_basis.shape[0] if subspace_basis is not None else (vecs[0].shape[0] if vecs else 0)
        v = np.stack(vecs, axis=1) if vecs else np.zeros((n, 0), dtype=complex)
    linalg.check_finite(v)
    if subspace_basis is None:
        f = v
        d = v.shape[0]
    else:
        q = np.asarray(subspace_basis, dtype=complex)
        f = q.conj().T @ v
        d = q.shape[1]
        resid = np.linalg.norm(v - q @ f) if v.size else 0.0
        if resid > subspace_tol * max(1.0, np.linalg.norm(v)):
            raise VectorOutsideSubspace(f"vectors leave the subspace by {resid:.3g}")
    if d == 0:
        return FrameBounds(0.0, 0.0, False)
    sigma = linalg.singular_values(f) if f.size else np.zeros(0)
    upper = float(sigma[0]) ** 2 if len(sigma) else 0.0
    spans = linalg.numerical_rank(sigma, rank_tol) == d
    lower = float(sigma[d - 1]) ** 2 if spans else 0.0
    return FrameBounds(lower, upper, spans)


def iterate_system(sys: IterateSystem) -> list[np.ndarray]:
    """R^j f_i for j = 0..k by repeated multiplication, i outer, j inner."""
    out = []
    for f in sys.vectors:
        x = f.copy()
        out.append(x)
        for _ in range(sys.iterations):
            x = sys.operator @ x
            linalg.check_finite(x)
            out.append(x)
    return out


@dataclass(frozen=True)
class EigenspaceFrame:
    """Frame data of {P_E f_i} for one eigenspace E = ker(R* - lam I)."""

    eigenvalue: complex
    basis: np.ndarray
    bounds: FrameBounds

    @property
    def dim(self) -> int:
        return self.basis.shape[1]


def adjoint_eigenspaces(r: np.ndarray, cluster_tol: float = linalg.CLUSTER_TOL,
                        kernel_tol: float = KERNEL_TOL) -> list[tuple[complex, np.ndarray]]:
    """Eigenvalues of R* with orthonormal bases of ker(R* - lam I).

    Works for any square R; for non-normal R the eigenvalues are those of a
    general eigensolver so defective spectra are only as good as LAPACK's.
    """
    rh = r.conj().T
    n = r.shape[0]
    eigs = np.linalg.eigvals(rh) if n else np.zeros(0, complex)
    out = []
    for c in linalg.cluster_values(eigs, cluster_tol):
        lam = complex(np.mean(eigs[c]))
        basis = linalg.kernel_basis(rh - lam * np.eye(n), kernel_tol)
        if basis.shape[1] == 0:
            basis = linalg.kernel_basis(rh - lam * np.eye(n), np.sqrt(kernel_tol))
        out.append((lam, basis))
    return out


@dataclass(frozen=True)
class CharacterizationResult:
    iterates_frame: bool
    projections_frames: bool
    iterate_bounds: FrameBounds
    per_eigenvalue: list

    @property
    def agree(self) -> bool:
        return self.iterates_frame == self.projections_frames


def ds_characterization_check(sys: IterateSystem, cluster_tol: float = linalg.CLUSTER_TOL,
                              rank_tol: float = linalg.RANK_TOL) -> CharacterizationResult:
    """Evaluate both sides of the finite-dimensional characterization: the
    iterates as a frame of C^n, and each {P_E f_i} as a frame of E for
    every eigenspace E of R*."""
    its = iterate_system(sys)
    it_bounds = frame_bounds_oracle(its, rank_tol=rank_tol) if its else FrameBounds(0.0, 0.0, False)
    per = []
    for lam, basis in adjoint_eigenspaces(sys.operator, cluster_tol):
        proj = [basis @ (basis.conj().T @ f) for f in sys.vectors]
        b = frame_bounds_oracle(proj, basis, rank_tol) if proj else FrameBounds(0.0, 0.0, False)
        per.append(EigenspaceFrame(lam, basis, b))
    proj_ok = bool(per) and all(e.bounds.is_frame for e in per)
    return CharacterizationResult(it_bounds.is_frame, proj_ok, it_bounds, per)


# --- bound formulas ----------------------------------------------------------


def c_lambda(lam: complex, k: int) -> float:
    """sum_{j=0}^k |lam|^(2j), with |0|^0 = 1."""
    if k < 0:
        raise ValueError("k must be >= 0")
    a2 = abs(lam) ** 2
    return float(sum(a2 ** j for j in range(k + 1)))


def _check_bounds(a: float, b: float) -> None:
    if not (a > 0) or a > b:
        raise InvalidBounds(f"need 0 < A <= B, got A={a!r}, B={b!r}")


def necessary_projection_bounds(a: float, b: float, lam: complex, k: int) -> FrameBounds:
    """Bounds inherited by {P_E f_i} on E = ker(R* - lam I) from an (A, B)
    iterate frame."""
    _check_bounds(a, b)
    c = c_lambda(lam, k)
    return FrameBounds(a / c, b / c, True)


def alpha_of(eigenvalues, cluster_tol: float = linalg.CLUSTER_TOL) -> float:
    """min over s of prod_{u != s} |lam_s - lam_u|^2 (1 for a single value)."""
    lam = np.asarray(eigenvalues, dtype=complex).ravel()
    if len(lam) == 0:
        raise ValueError("need at least one eigenvalue")
    diff = np.abs(lam[:, None] - lam[None, :])
    np.fill_diagonal(diff, np.inf)
    if len(lam) > 1 and diff.min() <= cluster_tol:
        raise DegenerateEigenvalues("eigenvalues coincide within cluster tolerance")
    np.fill_diagonal(diff, 1.0)
    return float(np.min(np.prod(diff ** 2, axis=1)))


def binomial_power_sum(r: int, x: float) -> float:
    """sum_{u=0}^{r-1} C(r-1, u)^2 x^(2u)."""
    return float(sum(comb(r - 1, u) ** 2 * x ** (2 * u) for u in range(r)))


def power_sum(x: float, k: int) -> float:
    """sum_{j=0}^k x^(2j)."""
    return float(sum(x ** (2 * j) for j in range(k + 1)))


@dataclass(frozen=True)
class InterpolationOperators:
    """Evaluation map T and Lagrange lift M between coefficient blocks
    (p_i) in P_k^m and value blocks (p_i(lam_s)).

    Coefficient index (i, j) maps to ``i*(k+1) + j``; value index (i, s)
    to ``i*r + s``.
    """

    t_matrix: np.ndarray
    m_matrix: np.ndarray
    eigenvalues: np.ndarray
    alpha: float
    beta: float
    k: int
    m: int

    @property
    def r(self) -> int:
        return len(self.eigenvalues)

    def t_bound(self) -> float:
        return float(np.sqrt(self.r * power_sum(self.beta, self.k)))

    def m_bound(self) -> float:
        return float(np.sqrt(self.r / self.alpha * binomial_power_sum(self.r, self.beta)))

    def m_bound_alt(self) -> float:
        """The cruder (r/alpha)^(1/2) (1 + beta)^r bound."""
        return float(np.sqrt(self.r / self.alpha) * (1.0 + self.beta) ** self.r)


def lagrange_coefficients(eigenvalues) -> np.ndarray:
    """Column s holds the ascending coefficients of the Lagrange basis
    polynomial B_s(z) = prod_{u != s} (z - lam_u) / (lam_s - lam_u)."""
    lam = np.asarray(eigenvalues, dtype=complex).ravel()
    r = len(lam)
    out = np.zeros((r, r), dtype=complex)
    for s in range(r):
        others = np.delete(lam, s)
        coeffs = np.polynomial.polynomial.polyfromroots(others) if r > 1 else np.ones(1, complex)
        out[:, s] = coeffs / np.prod(lam[s] - others)
    return out


def build_interpolation_operators(eigenvalues, m: int, k: int,
                                  cluster_tol: float = linalg.CLUSTER_TOL) -> InterpolationOperators:
    lam = np.asarray(eigenvalues, dtype=complex).ravel()
    r = len(lam)
    if k < r - 1:
        raise ValueError(f"need k >= r - 1, got k={k}, r={r}")
    alpha = alpha_of(lam, cluster_tol)
    vand = lam[:, None] ** np.arange(k + 1)[None, :]
    lift = np.zeros((k + 1, r), dtype=complex)
    lift[:r, :] = lagrange_coefficients(lam)
    eye = np.eye(m)
    return InterpolationOperators(
        t_matrix=np.kron(eye, vand),
        m_matrix=np.kron(eye, lift),
        eigenvalues=lam,
        alpha=alpha,
        beta=float(np.max(np.abs(lam))),
        k=k,
        m=m,
    )


def sufficient_iterate_bounds(a: float, b: float, r: int, alpha: float, op_norm: float, k: int) -> FrameBounds:
    """Iterate frame bounds guaranteed when every eigenspace projection system
    of a normal R with r distinct eigenvalues is an (A, B)-frame."""
    _check_bounds(a, b)
    if not alpha > 0:
        raise InvalidBounds(f"alpha must be positive, got {alpha!r}")
    if r < 1:
        raise ValueError("r must be >= 1")
    lower = a / (r / alpha * binomial_power_sum(r, op_norm))
    upper = b * (r * power_sum(op_norm, k))
    return FrameBounds(lower, upper, True)


def reduce_bounds(per_eigenspace) -> tuple[float, float]:
    """(min lower, max upper) over per-eigenspace FrameBounds."""
    lows = [fb.lower for fb in per_eigenspace]
    ups = [fb.upper for fb in per_eigenspace]
    return min(lows), max(ups)
