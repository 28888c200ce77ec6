"""Dynamical sampling for shift-preserving operators on the fiber grid.

Decides whether the iterates {L^j f_i : j < length} form a frame generator
set, and certifies the outcome against the explicit bound estimates in
both directions (necessary and, with a spectral gap, sufficient).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import linalg
from .errors import NoSpectralGap, NotNormal, VectorOutsideSubspace
from .fibers import (FIBER_TOL, FiberField, RangeFunctionField, UniformFrameReport,
                     check_same_grid, helson_project, spectrum_and_length, uniform_frame_check)
from .finite import FrameBounds, binomial_power_sum, power_sum
from .operators import (RangeOperatorField, SDiagonalization, adjoint_sdiag, apply_operator,
                        normality_check, s_diagonalize, spectral_gap)

SLACK = 1e-8


@dataclass(frozen=True, eq=False)
class DSInstance:
    J: RangeFunctionField
    Rf: RangeOperatorField
    functions: tuple
    length: int
    iterations: int  # K = {0..iterations}; length - 1 unless overridden

    @classmethod
    def build(cls, J, Rf, functions, iterations: int | None = None) -> "DSInstance":
        funcs = tuple(functions)
        if not funcs:
            raise ValueError("need at least one function")
        check_same_grid(J, Rf.J, *funcs)
        for i, f in enumerate(funcs):
            for p, q in enumerate(J.bases):
                v = f.values[p]
                resid = np.linalg.norm(v - q @ (q.conj().T @ v))
                if resid > FIBER_TOL * max(1.0, np.linalg.norm(v)):
                    raise VectorOutsideSubspace(f"function {i} leaves J at grid point {p} by {resid:.3g}")
        _, length = spectrum_and_length(J)
        if length < 1:
            raise ValueError("the space is trivial (length 0)")
        k = length - 1 if iterations is None else int(iterations)
        return cls(J, Rf, funcs, length, k)

    @property
    def off_theorem(self) -> bool:
        return self.iterations != self.length - 1


@dataclass
class FrameReport:
    true_bounds: FrameBounds | None
    estimated_bounds: FrameBounds | None
    verdict: bool | None
    provenance: str
    per_omega: np.ndarray | None = field(default=None, repr=False)
    skipped: str | None = None
    details: dict = field(default_factory=dict)

    def as_dict(self, with_detail: bool = False) -> dict:
        out = {
            "provenance": self.provenance,
            "true_bounds": self.true_bounds.as_dict() if self.true_bounds else None,
            "estimated_bounds": self.estimated_bounds.as_dict() if self.estimated_bounds else None,
            "verdict": self.verdict,
            "skipped": self.skipped,
        }
        out.update(self.details)
        if with_detail and self.per_omega is not None:
            out["per_omega"] = [[None if np.isnan(x) else float(x) for x in row] for row in self.per_omega]
        return out


def at_most(value: float, bound: float, slack: float = SLACK) -> bool:
    """value <= bound up to slack, relative once |bound| exceeds 1."""
    return value <= bound + slack * max(1.0, abs(bound))


def at_least(value: float, bound: float, slack: float = SLACK) -> bool:
    return value >= bound - slack * max(1.0, abs(bound))


def iterate_fiber_system(inst: DSInstance) -> list[FiberField]:
    """Fibers of L^j f_i, i outer, j inner, by repeated application of R(omega)."""
    out = []
    for f in inst.functions:
        x = f
        out.append(x)
        for _ in range(inst.iterations):
            x = apply_operator(inst.Rf, x)
            out.append(x)
    return out


def iterate_frame(inst: DSInstance, rank_tol: float = linalg.RANK_TOL) -> UniformFrameReport:
    return uniform_frame_check(iterate_fiber_system(inst), inst.J, rank_tol)


def projection_frames(inst: DSInstance, diag: SDiagonalization,
                      rank_tol: float = linalg.RANK_TOL) -> list[UniformFrameReport]:
    """Uniform frame data of {P_{V_{a_s}} f_i} in V_{a_s} for s = 1..r."""
    out = []
    for s in range(1, diag.r + 1):
        js = diag.eigenspace(s)
        projected = [helson_project(f, js) for f in inst.functions]
        out.append(uniform_frame_check(projected, js, rank_tol))
    return out


def necessary_estimate(a: float, b: float, norm: float, k: int) -> FrameBounds:
    return FrameBounds(a / power_sum(norm, k), b, True)


def check_necessary(inst: DSInstance, diag_adj: SDiagonalization, rank_tol: float = linalg.RANK_TOL,
                    iterates: UniformFrameReport | None = None,
                    projections: list[UniformFrameReport] | None = None) -> list[tuple[int, FrameReport]]:
    """Compare the projection systems' oracle bounds with the bounds implied
    by an (A, B) iterate frame: A (sum_j ||L||^(2j))^-1 and B."""
    it = iterates if iterates is not None else iterate_frame(inst, rank_tol)
    if not it.is_frame_generator:
        reason = "iterates do not form a frame generator set; hypothesis fails"
        return [(s, FrameReport(None, None, None, "necessary", skipped=reason))
                for s in range(1, diag_adj.r + 1)]
    projs = projections if projections is not None else projection_frames(inst, diag_adj, rank_tol)
    est = necessary_estimate(it.bounds.lower, it.bounds.upper, diag_adj.op_norm, inst.iterations)
    out = []
    for s, pr in enumerate(projs, start=1):
        tb = pr.bounds
        ok = tb.is_frame and at_least(tb.lower, est.lower) and at_most(tb.upper, est.upper)
        out.append((s, FrameReport(tb, est, ok, "necessary", per_omega=pr.per_omega,
                                   details={"s": s, "s_eigenvalue_sample": _sample_value(diag_adj, s)})))
    return out


def _sample_value(diag: SDiagonalization, s: int):
    idx = diag.spectra[s - 1]
    if len(idx) == 0:
        return None
    z = complex(diag.values[s - 1, idx[0]])
    return [z.real, z.imag]


def characterization_estimate(a: float, b: float, r: int, gap: float, norm: float, k: int) -> FrameBounds:
    """Iterate bounds from uniform (A, B) projection frames, with the gap
    capped at 1 so that alpha(omega) >= c^(2r) holds on every B_h."""
    c_eff = min(gap, 1.0)
    lower = a / (r / c_eff ** (2 * r) * binomial_power_sum(r, norm))
    upper = b * (r * power_sum(norm, k))
    return FrameBounds(lower, upper, lower > 0)


def check_characterization(inst: DSInstance, c_min: float = 0.0,
                           cluster_tol: float = linalg.CLUSTER_TOL,
                           rank_tol: float = linalg.RANK_TOL,
                           normal_tol: float = linalg.NORMAL_TOL,
                           diag: SDiagonalization | None = None,
                           iterates: UniformFrameReport | None = None) -> FrameReport:
    """Both sides of the spectral-gap characterization, plus the bound bracket."""
    if not normality_check(inst.Rf, normal_tol):
        raise NotNormal("range operator is not normal; characterization needs a normal operator")
    diag = diag if diag is not None else s_diagonalize(inst.Rf, cluster_tol, normal_tol)
    passes, c = spectral_gap(diag, c_min)
    if not passes:
        raise NoSpectralGap(f"measured gap {c:.6g} is below c_min = {c_min:.6g}")
    adj = adjoint_sdiag(diag)
    projs = projection_frames(inst, adj, rank_tol)
    it = iterates if iterates is not None else iterate_frame(inst, rank_tol)
    per_s = [p.bounds for p in projs]
    all_frames = all(b.is_frame for b in per_s)
    details = {
        "r": diag.r,
        "gap": c,
        "gap_effective": min(c, 1.0),
        "op_norm": diag.op_norm,
        "projections_frames": all_frames,
        "iterates_frame": it.is_frame_generator,
        "per_s": [b.as_dict() for b in per_s],
    }
    if all_frames:
        a, b = min(x.lower for x in per_s), max(x.upper for x in per_s)
        est = characterization_estimate(a, b, diag.r, c, diag.op_norm, inst.iterations)
        agree = it.is_frame_generator
        bracket = agree and at_most(est.lower, it.bounds.lower) and at_least(est.upper, it.bounds.upper)
        details.update(projection_lower=a, projection_upper=b)
    else:
        est = None
        agree = not it.is_frame_generator
        bracket = agree
    details.update(agreement=agree, bracket=bracket)
    return FrameReport(it.bounds, est, bool(agree and bracket), "characterization",
                       per_omega=it.per_omega, details=details)
