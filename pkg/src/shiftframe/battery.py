"""Randomized property battery: every theorem-backed equivalence and bound
bracket, checked against the singular-value oracle on seeded instances.

Each family is a function ``seed -> dict`` with a boolean ``"pass"``; the
battery derives per-instance seeds from (battery seed, family, index) so
any failure can be replayed from the recorded seed alone.
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import linalg
from .fibers import FiberField, FiberWindow, OmegaGrid, range_function_from_generators
from .finite import (IterateSystem, alpha_of, build_interpolation_operators, ds_characterization_check,
                     necessary_projection_bounds, reduce_bounds, sufficient_iterate_bounds)
from .instances import complex_gaussian, generate_instance, load_instance, make_rng, random_spec, random_unitary
from .operators import RangeOperatorField, adjoint_sdiag, s_diagonalize, spectral_reconstruction_residual
from .sampling import (DSInstance, at_least, at_most, characterization_estimate, check_characterization,
                       check_necessary, iterate_frame, necessary_estimate, projection_frames)

MIN_SEPARATION = 0.1


def derive_seed(seed: int, family: str, index: int) -> int:
    tag = sum(ord(c) << (8 * (i % 4)) for i, c in enumerate(family))
    ss = np.random.SeedSequence([int(seed) & (2**63 - 1), tag, index])
    return int(ss.generate_state(1, np.uint64)[0] >> 1)


# --- random finite-dimensional operators ------------------------------------


def separated_points(rng, r: int, radius: float = 1.5, sep: float = MIN_SEPARATION) -> np.ndarray:
    """r complex numbers in the disk, pairwise at least ``sep`` apart."""
    while True:
        z = radius * np.sqrt(rng.uniform(size=r)) * np.exp(2j * np.pi * rng.uniform(size=r))
        if r < 2:
            return z
        d = np.abs(z[:, None] - z[None, :])
        np.fill_diagonal(d, np.inf)
        if d.min() >= sep:
            return z


def random_normal(rng, n: int, repeats: bool = True):
    """R = Q diag(lam) Q* with r <= n distinct separated eigenvalues.

    Returns (R, Q, labels, values): column t of Q spans part of the
    eigenspace of ``values[labels[t]]``.
    """
    r = int(rng.integers(1, n + 1)) if repeats else n
    values = separated_points(rng, r)
    labels = np.concatenate([np.arange(r), rng.integers(0, r, size=n - r)])
    rng.shuffle(labels)
    q = random_unitary(rng, n)
    lam = values[labels]
    return (q * lam[None, :]) @ q.conj().T, q, labels, values


def random_nonnormal(rng, n: int):
    """Either S diag S^-1 with distinct eigenvalues or a triangular matrix
    with repeated diagonal (possibly defective).  Returns (R, left_kernels)
    with an orthonormal basis of ker(R* - conj(lam) I) per eigenvalue."""
    if rng.uniform() < 0.5:
        values = separated_points(rng, n)
        s = np.eye(n) + 0.4 * complex_gaussian(rng, (n, n))
        sinv = np.linalg.inv(s)
        r = s @ np.diag(values) @ sinv
        kernels = [linalg.orthonormal_span([sinv[t].conj()])[0] for t in range(n)]
        return r, kernels
    k = int(rng.integers(1, n + 1))
    values = separated_points(rng, k)
    diag = values[np.sort(np.concatenate([np.arange(k), rng.integers(0, k, size=n - k)]))]
    r = np.diag(diag) + np.triu(complex_gaussian(rng, (n, n)), 1)
    kernels = []
    for v in values:
        kernels.append(linalg.kernel_basis(r.conj().T - np.conj(v) * np.eye(n), 1e-10))
    return r, kernels


def _plant_orthogonal(vectors, basis):
    """Remove the component along span(basis) from each vector."""
    return [f - basis @ (basis.conj().T @ f) for f in vectors]


# --- families ------------------------------------------------------------------


def fd_equivalence(seed: int) -> dict:
    """Both sides of the finite characterization agree (k = n - 1)."""
    rng = make_rng(seed)
    n = int(rng.integers(2, 7))
    m = int(rng.integers(1, 4))
    normal = rng.uniform() < 0.5
    if normal:
        r, q, labels, values = random_normal(rng, n)
        kernels = [q[:, labels == s] for s in range(len(values))]
    else:
        r, kernels = random_nonnormal(rng, n)
    vecs = list(complex_gaussian(rng, (m, n)))
    planted = bool(rng.uniform() < 0.3)
    if planted:
        vecs = _plant_orthogonal(vecs, kernels[int(rng.integers(len(kernels)))])
    res = ds_characterization_check(IterateSystem.build(r, vecs))
    return {"pass": res.agree, "normal": normal, "planted": planted, "n": n, "m": m,
            "iterates_frame": res.iterates_frame, "projections_frames": res.projections_frames}


def _normal_frame_instance(rng, max_tries: int = 50):
    """Normal R and vectors whose iterates (k = n - 1) form a frame."""
    for _ in range(max_tries):
        n = int(rng.integers(2, 7))
        r, _, labels, _ = random_normal(rng, n)
        mult = int(np.bincount(labels).max())
        m = int(rng.integers(mult, max(mult, 3) + 1))
        sys = IterateSystem.build(r, complex_gaussian(rng, (m, n)))
        res = ds_characterization_check(sys)
        if res.iterates_frame and res.projections_frames:
            return sys, res
    raise RuntimeError("could not draw a frame instance")


def fd_necessary(seed: int) -> dict:
    """Projection bounds lie inside [A / C_lam, B / C_lam]."""
    rng = make_rng(seed)
    sys, res = _normal_frame_instance(rng)
    a, b = res.iterate_bounds.lower, res.iterate_bounds.upper
    ok = True
    worst = np.inf
    for e in res.per_eigenvalue:
        est = necessary_projection_bounds(a, b, e.eigenvalue, sys.iterations)
        ok &= at_least(e.bounds.lower, est.lower) and at_most(e.bounds.upper, est.upper)
        worst = min(worst, e.bounds.lower / est.lower)
    return {"pass": bool(ok), "n": sys.dim, "min_lower_ratio": worst}


def fd_sufficient(seed: int) -> dict:
    """Estimated iterate bounds bracket the oracle iterate bounds."""
    rng = make_rng(seed)
    sys, res = _normal_frame_instance(rng)
    a, b = reduce_bounds([e.bounds for e in res.per_eigenvalue])
    lams = [e.eigenvalue for e in res.per_eigenvalue]
    est = sufficient_iterate_bounds(a, b, len(lams), alpha_of(lams), linalg.spectral_norm(sys.operator),
                                    sys.iterations)
    true = res.iterate_bounds
    ok = at_most(est.lower, true.lower) and at_least(est.upper, true.upper)
    return {"pass": bool(ok), "n": sys.dim, "r": len(lams),
            "lower_ratio": est.lower / true.lower, "upper_ratio": est.upper / true.upper}


def interpolation_operators(seed: int) -> dict:
    """T M = I and the explicit norm bounds on T and M."""
    rng = make_rng(seed)
    r = int(rng.integers(1, 6))
    k = int(rng.integers(r - 1, 9))
    m = int(rng.integers(1, 4))
    ops = build_interpolation_operators(separated_points(rng, r), m, k)
    tm_err = linalg.spectral_norm(ops.t_matrix @ ops.m_matrix - np.eye(m * r))
    t_norm = linalg.spectral_norm(ops.t_matrix)
    m_norm = linalg.spectral_norm(ops.m_matrix)
    ok = (tm_err <= 1e-10 and at_most(t_norm, ops.t_bound()) and at_most(m_norm, ops.m_bound())
          and at_most(m_norm, ops.m_bound_alt()))
    return {"pass": bool(ok), "r": r, "k": k, "m": m, "tm_error": tm_err,
            "t_norm": t_norm, "t_bound": ops.t_bound(), "m_norm": m_norm, "m_bound": ops.m_bound(),
            "m_bound_alt": ops.m_bound_alt()}


def sdiag_structure(seed: int, points_per_axis: int = 256) -> dict:
    """Reconstruction, projection sums, orthogonality, B_h partition, nesting."""
    inst = load_instance(generate_instance(random_spec(seed, points_per_axis))).instance
    rf = inst.Rf
    diag = s_diagonalize(rf)
    resid = spectral_reconstruction_residual(rf, diag)
    sum_err = orth_err = 0.0
    for p in range(rf.grid.size):
        h = int(diag.counts[p])
        projs = [diag.projection(s, p) for s in range(1, h + 1)]
        total = sum(projs) if projs else np.zeros((rf.window.size,) * 2)
        sum_err = max(sum_err, linalg.spectral_norm(total - inst.J.projector(p)))
        for a in range(h):
            for b in range(a + 1, h):
                orth_err = max(orth_err, linalg.spectral_norm(projs[a] @ projs[b]))
    spec = set(np.flatnonzero(inst.J.dims > 0).tolist())
    parts = [set(b.tolist()) for b in diag.partition]
    union = set().union(*parts) if parts else set()
    disjoint = sum(len(b) for b in parts) == len(union)
    exact_counts = True
    for h, part in enumerate(parts, start=1):
        for p in part:
            vals = diag.values[:h, p]
            d = np.abs(vals[:, None] - vals[None, :])
            np.fill_diagonal(d, np.inf)
            exact_counts &= (h == 1 or d.min() > linalg.CLUSTER_TOL) and np.all(
                np.abs(diag.values[h:, p]) > diag.op_norm)
    spectra = [set(s.tolist()) for s in diag.spectra]
    nested = all(spectra[s + 1] <= spectra[s] for s in range(len(spectra) - 1))
    ok = (resid <= 1e-8 and sum_err <= 1e-10 and orth_err <= 1e-10 and disjoint and union == spec
          and exact_counts and nested and diag.r <= 3)
    return {"pass": bool(ok), "r": diag.r, "n": rf.window.size, "reconstruction": resid,
            "projection_sum": sum_err, "orthogonality": orth_err, "partition_exact": bool(disjoint and union == spec),
            "nested": bool(nested)}


def fiber_characterization(seed: int, points_per_axis: int = 32) -> dict:
    """Gapped characterization: verdict equivalence and both bound brackets."""
    inst = load_instance(generate_instance(random_spec(seed, points_per_axis))).instance
    diag = s_diagonalize(inst.Rf)
    it = iterate_frame(inst)
    rep = check_characterization(inst, MIN_SEPARATION, diag=diag, iterates=it)
    nec = check_necessary(inst, adjoint_sdiag(diag), iterates=it)
    nec_ok = all(r.verdict for _, r in nec) if it.is_frame_generator else True
    return {"pass": bool(rep.verdict and nec_ok), "equivalence": rep.details["agreement"],
            "bracket": rep.details["bracket"], "necessary": bool(nec_ok),
            "iterates_frame": rep.details["iterates_frame"], "r": diag.r, "gap": diag.gap}


def fiber_planted(seed: int, points_per_axis: int = 32) -> dict:
    """A zero projection on one s-eigenspace: both sides must say 'not a frame'."""
    inst = load_instance(generate_instance(random_spec(seed, points_per_axis, planted=True))).instance
    rep = check_characterization(inst, MIN_SEPARATION)
    d = rep.details
    ok = (not d["projections_frames"]) and (not d["iterates_frame"]) and rep.verdict
    return {"pass": bool(ok), "iterates_frame": d["iterates_frame"], "projections_frames": d["projections_frames"]}


def constant_instance(seed: int, points_per_axis: int = 4):
    """Constant-in-omega instance; returns (DSInstance, R0, f0) with R0, f0
    the coordinates of the single fiber in an orthonormal basis of J."""
    rng = make_rng(seed)
    radius = int(rng.integers(1, 3))
    window = FiberWindow(radius, 1)
    grid = OmegaGrid(1, points_per_axis)
    n = window.size
    d = int(rng.integers(2, min(n, 6) + 1))
    r0, _, labels, _ = random_normal(rng, d)
    mult = int(np.bincount(labels).max())
    m = int(rng.integers(1, max(mult, 3) + 1))
    q0 = random_unitary(rng, n)[:, :d]
    f0 = complex_gaussian(rng, (m, d))
    gens = [FiberField.constant(grid, window, q0[:, t]) for t in range(d)]
    J = range_function_from_generators(gens, grid=grid, window=window)
    mats = np.tile(q0 @ r0 @ q0.conj().T, (grid.size, 1, 1))
    funcs = [FiberField.constant(grid, window, q0 @ f) for f in f0]
    return DSInstance.build(J, RangeOperatorField(J, mats), funcs), r0, f0


def constant_reduction(seed: int, tol: float = 1e-10) -> dict:
    """A constant-field instance reproduces the single-fiber finite results."""
    inst, r0, f0 = constant_instance(seed)
    fd = ds_characterization_check(IterateSystem.build(r0, list(f0), inst.iterations))
    diag = s_diagonalize(inst.Rf)
    adj = adjoint_sdiag(diag)
    it = iterate_frame(inst)
    projs = projection_frames(inst, adj)
    close = lambda x, y: abs(x - y) <= tol * max(1.0, abs(y))  # noqa: E731
    ok = it.is_frame_generator == fd.iterates_frame
    ok &= close(it.bounds.lower, fd.iterate_bounds.lower) and close(it.bounds.upper, fd.iterate_bounds.upper)
    ok &= diag.r == len(fd.per_eigenvalue)
    for s, pr in enumerate(projs, start=1):
        b_s = complex(adj.values[s - 1, 0])
        match = min(fd.per_eigenvalue, key=lambda e: abs(e.eigenvalue - b_s))
        ok &= abs(match.eigenvalue - b_s) <= 1e-8
        ok &= pr.bounds.is_frame == match.bounds.is_frame
        ok &= close(pr.bounds.lower, match.bounds.lower) and close(pr.bounds.upper, match.bounds.upper)
    all_frames = all(p.bounds.is_frame for p in projs)
    ok &= all_frames == fd.projections_frames
    norm0 = linalg.spectral_norm(r0)
    if all_frames:
        a, b = reduce_bounds([p.bounds for p in projs])
        est = characterization_estimate(a, b, diag.r, diag.gap, diag.op_norm, inst.iterations)
        c_eff = min(diag.gap, 1.0)
        fd_est = sufficient_iterate_bounds(a, b, diag.r, c_eff ** (2 * diag.r), norm0, inst.iterations)
        ok &= close(est.lower, fd_est.lower) and close(est.upper, fd_est.upper)
        alpha_est = sufficient_iterate_bounds(a, b, diag.r, alpha_of([e.eigenvalue for e in fd.per_eigenvalue]),
                                              norm0, inst.iterations)
        ok &= at_most(est.lower, alpha_est.lower)
    if it.is_frame_generator:
        nec = necessary_estimate(it.bounds.lower, it.bounds.upper, diag.op_norm, inst.iterations)
        fd_nec = necessary_projection_bounds(fd.iterate_bounds.lower, fd.iterate_bounds.upper, norm0,
                                             inst.iterations)
        ok &= close(nec.lower, fd_nec.lower)
    return {"pass": bool(ok), "iterates_frame": it.is_frame_generator, "r": diag.r}


FAMILIES = {
    "fd-equivalence": fd_equivalence,
    "fd-necessary": fd_necessary,
    "interpolation-operators": interpolation_operators,
    "fd-sufficient": fd_sufficient,
    "fiber-characterization": fiber_characterization,
    "fiber-planted": fiber_planted,
    "constant-reduction": constant_reduction,
}

GRID_FAMILIES = {"fiber-characterization", "fiber-planted"}


def run_family(family: str, seed: int, points_per_axis: int | None = None) -> dict:
    fn = FAMILIES[family]
    if points_per_axis is not None and family in GRID_FAMILIES:
        return fn(seed, points_per_axis)
    return fn(seed)


def _job(args):
    family, index, inst_seed, m = args
    try:
        res = run_family(family, inst_seed, m)
    except Exception as exc:  # failures are data
        res = {"pass": False, "error": f"{type(exc).__name__}: {exc}"}
    return family, index, inst_seed, res


def worker_count() -> int:
    try:
        return max(1, int(os.environ.get("SHIFTFRAME_THREADS", "1")))
    except ValueError:
        return 1


def oracle_battery(n_instances: int, seed: int, families=None, points_per_axis: int = 32,
                   workers: int | None = None) -> dict:
    """Run ``n_instances`` of every family; summary counts plus replayable
    failing seeds."""
    fams = list(families) if families else list(FAMILIES)
    jobs = [(f, i, derive_seed(seed, f, i), points_per_axis) for f in fams for i in range(n_instances)]
    workers = worker_count() if workers is None else workers
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            results = list(ex.map(_job, jobs, chunksize=8))
    else:
        results = [_job(j) for j in jobs]
    summary = {f: {"passed": 0, "failed": 0, "failures": []} for f in fams}
    for family, index, inst_seed, res in results:
        entry = summary[family]
        if res.get("pass"):
            entry["passed"] += 1
        else:
            entry["failed"] += 1
            entry["failures"].append({"index": index, "seed": inst_seed, "detail": res})
    total_failed = sum(e["failed"] for e in summary.values())
    return {"seed": seed, "n_instances": n_instances, "points_per_axis": points_per_axis,
            "families": summary, "all_passed": total_failed == 0}
