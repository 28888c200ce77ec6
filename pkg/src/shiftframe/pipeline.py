"""End-to-end check of one instance document and the report it produces."""

from __future__ import annotations

from dataclasses import dataclass

from . import __version__, linalg
from .errors import NoSpectralGap, NotNormal
from .instances import load_instance
from .jsonio import digest, load_file
from .operators import (adjoint_eigenfields, adjoint_sdiag, normality_check, op_norm, s_diagonalize,
                        spectral_gap, spectral_reconstruction_residual)
from .sampling import check_characterization, check_necessary, iterate_frame

GRID_NOTE = ("Results are exact for instances defined on the grid; for continuous fields "
             "they are advisory, since a finite grid cannot certify almost-everywhere statements.")


@dataclass
class CheckOptions:
    c_min: float = 0.0
    cluster_tol: float = linalg.CLUSTER_TOL
    rank_tol: float = linalg.RANK_TOL
    normal_tol: float = linalg.NORMAL_TOL
    iterations: int | None = None
    characterize: bool = True
    detail: bool = False


def full_pipeline(source, opts: CheckOptions | None = None) -> dict:
    """Load an instance (path or parsed document) and build the report.

    Schema problems raise SchemaError; mathematical failures (non-normal
    operator, missing gap) are recorded under ``errors`` in the report.
    """
    opts = opts or CheckOptions()
    doc = load_file(source) if not isinstance(source, dict) else source
    loaded = load_instance(doc, opts.rank_tol, opts.iterations)
    inst = loaded.instance
    J, Rf = inst.J, inst.Rf
    normal = normality_check(Rf, opts.normal_tol)
    norm = op_norm(Rf)
    errors = []
    quantities = {
        "grid_points": J.grid.size,
        "window_size": J.window.size,
        "length": inst.length,
        "iterations": inst.iterations,
        "off_theorem": inst.off_theorem,
        "spectrum_size": int((J.dims > 0).sum()),
        "normal": normal,
        "op_norm": norm,
        "generator_count": len(loaded.generators),
        "function_count": len(inst.functions),
    }
    it = iterate_frame(inst, opts.rank_tol)
    diag = None
    if normal:
        diag = s_diagonalize(Rf, opts.cluster_tol, opts.normal_tol)
        adj = adjoint_sdiag(diag)
        quantities["reconstruction_residual"] = spectral_reconstruction_residual(Rf, diag)
    else:
        adj = adjoint_eigenfields(Rf, opts.cluster_tol)
    quantities.update({
        "r": adj.r,
        "gap": adj.gap,
        "padding_constant": adj.padding_constant,
        "partition_sizes": [len(b) for b in adj.partition],
        "spectra_sizes": [len(s) for s in adj.spectra],
    })
    necessary = check_necessary(inst, adj, opts.rank_tol, iterates=it)
    nec_records = [r.as_dict(opts.detail) for _, r in necessary]
    nec_verdicts = [r.verdict for _, r in necessary if r.verdict is not None]
    nec_verdict = all(nec_verdicts) if nec_verdicts else None

    char = None
    char_verdict = None
    if opts.characterize:
        try:
            if diag is None:
                raise NotNormal("range operator is not normal at every grid point")
            passes, c = spectral_gap(diag, opts.c_min)
            if not passes:
                raise NoSpectralGap(f"measured gap {c:.6g} is below c_min = {opts.c_min:.6g}")
            rep = check_characterization(inst, opts.c_min, opts.cluster_tol, opts.rank_tol, opts.normal_tol,
                                         diag=diag, iterates=it)
            char = rep.as_dict(opts.detail)
            char_verdict = rep.verdict
        except (NotNormal, NoSpectralGap) as exc:
            errors.append({"stage": "characterization", "error": type(exc).__name__, "message": str(exc)})

    violated = nec_verdict is False or char_verdict is False
    return {
        "tool": "shiftframe",
        "version": __version__,
        "instance_digest": digest(doc),
        "note": GRID_NOTE,
        "options": {"c_min": opts.c_min, "cluster_tol": opts.cluster_tol, "rank_tol": opts.rank_tol,
                    "normal_tol": opts.normal_tol, "characterize": opts.characterize},
        "quantities": quantities,
        "iterates": {"bounds": it.bounds.as_dict(), "is_frame_generator": it.is_frame_generator},
        "necessary": nec_records,
        "characterization": char,
        "errors": errors,
        "verdicts": {"necessary": nec_verdict, "characterization": char_verdict,
                     "all": (not violated) and not errors},
    }


def exit_code(report: dict) -> int:
    if report["errors"]:
        return 1
    v = report["verdicts"]
    if v["necessary"] is False or v["characterization"] is False:
        return 2
    return 0
