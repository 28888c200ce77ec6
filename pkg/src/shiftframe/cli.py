"""Command-line interface.

Exit codes: 0 all verdicts hold, 1 error, 2 a bracket or equivalence was
violated, 64 usage error, 65 unreadable or malformed input.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import __version__, jsonio, linalg
from .battery import FAMILIES, oracle_battery, run_family
from .errors import SchemaError, ShiftFrameError
from .finite import (IterateSystem, alpha_of, build_interpolation_operators, ds_characterization_check,
                     necessary_projection_bounds, reduce_bounds, sufficient_iterate_bounds)
from .instances import PRESETS, InstanceSpec, generate_instance, load_instance
from .operators import s_diagonalize, spectral_reconstruction_residual
from .pipeline import GRID_NOTE, CheckOptions, exit_code, full_pipeline
from .sampling import at_least, at_most

EX_USAGE = 64
EX_DATAERR = 65


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        sys.exit(EX_USAGE)


def _emit_json(obj, target) -> None:
    text = jsonio.dumps(obj)
    if target in (None, "-"):
        print(text)
    else:
        with open(target, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")


def _fmt(x) -> str:
    if isinstance(x, float):
        return f"{x:.6g}"
    return str(x)


def _table(rows) -> str:
    width = max(len(k) for k, _ in rows) if rows else 0
    return "\n".join(f"  {k.ljust(width)}  {_fmt(v)}" for k, v in rows)


def _add_tolerances(p):
    p.add_argument("--cluster-tol", type=float, default=linalg.CLUSTER_TOL)
    p.add_argument("--rank-tol", type=float, default=linalg.RANK_TOL)
    p.add_argument("--normal-tol", type=float, default=linalg.NORMAL_TOL)


# --- check -------------------------------------------------------------------


def _print_check(rep: dict) -> None:
    q = rep["quantities"]
    print("quantities")
    print(_table([(k, q[k]) for k in ("grid_points", "window_size", "spectrum_size", "length", "iterations",
                                        "normal", "op_norm", "r", "gap", "padding_constant")]))
    it = rep["iterates"]["bounds"]
    print(f"iterates: frame generator set = {it['is_frame']}  A = {_fmt(it['lower'])}  B = {_fmt(it['upper'])}")
    print("necessary (per s-eigenspace of L*)")
    for i, r in enumerate(rep["necessary"], start=1):
        if r["skipped"]:
            print(f"  s={i}: skipped ({r['skipped']})")
            continue
        tb, eb = r["true_bounds"], r["estimated_bounds"]
        print(f"  s={i}: true ({_fmt(tb['lower'])}, {_fmt(tb['upper'])})  "
              f"estimate ({_fmt(eb['lower'])}, {_fmt(eb['upper'])})  verdict {r['verdict']}")
    ch = rep["characterization"]
    if ch is not None:
        eb = ch["estimated_bounds"]
        est = f"({_fmt(eb['lower'])}, {_fmt(eb['upper'])})" if eb else "n/a (some projection is not a frame)"
        print("characterization")
        print(_table([("projections frames", ch["projections_frames"]), ("iterates frame", ch["iterates_frame"]),
                      ("estimated bounds", est), ("agreement", ch["agreement"]), ("bracket", ch["bracket"]),
                      ("verdict", ch["verdict"])]))
    for e in rep["errors"]:
        print(f"error in {e['stage']}: {e['error']}: {e['message']}")
    if q["off_theorem"]:
        print("warning: iteration count overridden; results are outside the theorem's hypotheses")
    print(f"note: {rep['note']}")
    print(f"overall: {'PASS' if exit_code(rep) == 0 else 'FAIL'}")


def cmd_check(args) -> int:
    opts = CheckOptions(c_min=args.c_min, cluster_tol=args.cluster_tol, rank_tol=args.rank_tol,
                        normal_tol=args.normal_tol, iterations=args.iterations,
                        characterize=args.characterize, detail=args.detail)
    rep = full_pipeline(args.instance, opts)
    if args.json is not None:
        _emit_json(rep, args.json)
    if args.json not in ("-",):
        _print_check(rep)
    return exit_code(rep)


# --- fd-check ----------------------------------------------------------------


def _load_matrix_instance(path):
    doc = jsonio.load_file(path)
    if not isinstance(doc, dict) or "operator" not in doc or "vectors" not in doc:
        raise SchemaError("need 'operator' and 'vectors'", str(path))
    op = doc["operator"]
    if not isinstance(op, list) or not op:
        raise SchemaError("expected a square matrix", "operator")
    n = len(op)
    r = jsonio.parse_complex_array(op, (n, n), "operator")
    vecs = doc["vectors"]
    if not isinstance(vecs, list) or not vecs:
        raise SchemaError("expected a non-empty list of vectors", "vectors")
    v = jsonio.parse_complex_array(vecs, (len(vecs), n), "vectors")
    k = doc.get("iterations")
    if k is not None and (not isinstance(k, int) or isinstance(k, bool) or k < 0):
        raise SchemaError("expected an integer >= 0", "iterations")
    return IterateSystem.build(r, list(v), k)


def fd_report(sys_: IterateSystem, cluster_tol: float, rank_tol: float, normal_tol: float) -> dict:
    res = ds_characterization_check(sys_, cluster_tol, rank_tol)
    it = res.iterate_bounds
    per = [{"eigenvalue": e.eigenvalue, "dim": e.dim, "bounds": e.bounds.as_dict()} for e in res.per_eigenvalue]
    out = {"n": sys_.dim, "iterations": sys_.iterations, "off_theorem": sys_.iterations < sys_.dim - 1,
           "iterates": it.as_dict(), "per_eigenvalue": per, "agreement": res.agree,
           "normal": linalg.is_normal(sys_.operator, normal_tol)}
    ok = res.agree
    if it.is_frame:
        nec = []
        for e in res.per_eigenvalue:
            est = necessary_projection_bounds(it.lower, it.upper, e.eigenvalue, sys_.iterations)
            good = e.bounds.is_frame and at_least(e.bounds.lower, est.lower) and at_most(e.bounds.upper, est.upper)
            nec.append({"eigenvalue": e.eigenvalue, "estimate": est.as_dict(), "bracket": good})
            ok &= good
        out["necessary"] = nec
    if out["normal"] and res.projections_frames:
        lams = [e.eigenvalue for e in res.per_eigenvalue]
        a, b = reduce_bounds([e.bounds for e in res.per_eigenvalue])
        alpha = alpha_of(lams, cluster_tol)
        norm = linalg.spectral_norm(sys_.operator)
        est = sufficient_iterate_bounds(a, b, len(lams), alpha, norm, sys_.iterations)
        good = it.is_frame and at_most(est.lower, it.lower) and at_least(est.upper, it.upper)
        out["sufficient"] = {"alpha": alpha, "op_norm": norm, "r": len(lams), "estimate": est.as_dict(),
                             "bracket": good}
        ok &= good
        if sys_.iterations >= len(lams) - 1:
            ops = build_interpolation_operators(lams, len(sys_.vectors), sys_.iterations, cluster_tol)
            out["interpolation"] = {
                "tm_error": linalg.spectral_norm(ops.t_matrix @ ops.m_matrix - np.eye(ops.m * ops.r)),
                "t_norm": linalg.spectral_norm(ops.t_matrix), "t_bound": ops.t_bound(),
                "m_norm": linalg.spectral_norm(ops.m_matrix), "m_bound": ops.m_bound(),
                "m_bound_alt": ops.m_bound_alt(), "beta": ops.beta}
    out["verdict"] = bool(ok)
    return out


def cmd_fd_check(args) -> int:
    rep = fd_report(_load_matrix_instance(args.instance), args.cluster_tol, args.rank_tol, args.normal_tol)
    if args.json is not None:
        _emit_json(rep, args.json)
    if args.json != "-":
        it = rep["iterates"]
        print(_table([("n", rep["n"]), ("iterations", rep["iterations"]), ("normal", rep["normal"]),
                      ("iterates frame", it["is_frame"]), ("A", it["lower"]), ("B", it["upper"])]))
        for e in rep["per_eigenvalue"]:
            z = complex(e["eigenvalue"])
            b = e["bounds"]
            print(f"  lambda={z.real:.6g}{z.imag:+.6g}i dim={e['dim']} frame={b['is_frame']} "
                  f"({_fmt(b['lower'])}, {_fmt(b['upper'])})")
        if "sufficient" in rep:
            s = rep["sufficient"]["estimate"]
            print(f"  sufficient estimate ({_fmt(s['lower'])}, {_fmt(s['upper'])}) bracket {rep['sufficient']['bracket']}")
        print(f"agreement: {rep['agreement']}  verdict: {rep['verdict']}")
    return 0 if rep["verdict"] else 2


# --- diag ----------------------------------------------------------------------


def cmd_diag(args) -> int:
    inst = load_instance(jsonio.load_file(args.instance), args.rank_tol).instance
    d = s_diagonalize(inst.Rf, args.cluster_tol, args.normal_tol)
    out = {
        "r": d.r, "padding_constant": d.padding_constant, "gap": d.gap, "op_norm": d.op_norm,
        "counts": d.counts, "partition_sizes": [len(b) for b in d.partition],
        "spectra_sizes": [len(s) for s in d.spectra],
        "a_hat": d.values,
        "eigenspace_dims": [[b.shape[1] for b in bs] for bs in d.eigenbases],
        "reconstruction_residual": spectral_reconstruction_residual(inst.Rf, d),
        "note": GRID_NOTE,
    }
    if args.projections:
        out["projections"] = [[d.projection(s, p) for p in range(inst.J.grid.size)] for s in range(1, d.r + 1)]
    if args.json is not None:
        _emit_json(out, args.json)
    if args.json != "-":
        print(_table([("r", d.r), ("K", d.padding_constant), ("gap", d.gap), ("op_norm", d.op_norm),
                      ("B_h sizes", out["partition_sizes"]), ("spectra sizes", out["spectra_sizes"]),
                      ("reconstruction", out["reconstruction_residual"])]))
    return 0


# --- gen / oracle / version ----------------------------------------------------


def cmd_gen(args) -> int:
    if args.spec:
        spec_doc = jsonio.load_file(args.spec)
        if not isinstance(spec_doc, dict):
            raise SchemaError("spec must be a JSON object", args.spec)
        try:
            spec = InstanceSpec.from_dict(spec_doc)
        except TypeError as exc:
            raise SchemaError(str(exc), args.spec) from None
        doc = generate_instance(spec)
    else:
        doc = PRESETS[args.preset](args.seed, args.grid_points)
    if args.output in (None, "-"):
        print(jsonio.dumps(doc))
    else:
        jsonio.write_file(args.output, doc)
    return 0


def cmd_oracle(args) -> int:
    if args.replay:
        family, _, seed = args.replay.partition(":")
        if family not in FAMILIES or not seed.lstrip("-").isdigit():
            print(f"bad --replay value {args.replay!r}; expected FAMILY:SEED", file=sys.stderr)
            return EX_USAGE
        res = run_family(family, int(seed), args.grid_points)
        _emit_json({"family": family, "seed": int(seed), "result": res}, args.json if args.json else "-")
        return 0 if res["pass"] else 2
    summary = oracle_battery(args.n, args.seed, args.family or None, args.grid_points)
    if args.json is not None:
        _emit_json(summary, args.json)
    if args.json != "-":
        for fam, e in summary["families"].items():
            line = f"  {fam.ljust(24)} {e['passed']}/{e['passed'] + e['failed']}"
            if e["failures"]:
                line += "  failing seeds: " + ", ".join(str(f["seed"]) for f in e["failures"][:5])
            print(line)
        print(f"overall: {'PASS' if summary['all_passed'] else 'FAIL'}")
    return 0 if summary["all_passed"] else 2


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="shiftframe", description="Dynamical sampling frame checks for shift-preserving operators.")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)

    c = sub.add_parser("check", help="run the full pipeline on an instance")
    c.add_argument("--instance", required=True)
    c.add_argument("--c-min", type=float, default=0.0)
    c.add_argument("--iterations", type=int, default=None, help="override k (off-theorem)")
    c.add_argument("--characterize", action=argparse.BooleanOptionalAction, default=True)
    c.add_argument("--detail", action="store_true", help="include per-grid-point bounds")
    c.add_argument("--json", nargs="?", const="-", default=None, metavar="OUT")
    _add_tolerances(c)
    c.set_defaults(func=cmd_check)

    f = sub.add_parser("fd-check", help="finite-dimensional check of a single matrix instance")
    f.add_argument("--instance", required=True)
    f.add_argument("--json", nargs="?", const="-", default=None, metavar="OUT")
    _add_tolerances(f)
    f.set_defaults(func=cmd_fd_check)

    d = sub.add_parser("diag", help="emit the s-diagonalization of an instance's operator")
    d.add_argument("--instance", required=True)
    d.add_argument("--projections", action="store_true")
    d.add_argument("--json", nargs="?", const="-", default=None, metavar="OUT")
    _add_tolerances(d)
    d.set_defaults(func=cmd_diag)

    g = sub.add_parser("gen", help="write an instance document")
    src = g.add_mutually_exclusive_group(required=True)
    src.add_argument("--preset", choices=sorted(PRESETS))
    src.add_argument("--spec", help="InstanceSpec JSON file")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--grid-points", type=int, default=None)
    g.add_argument("-o", "--output", default=None)
    g.set_defaults(func=cmd_gen)

    o = sub.add_parser("oracle", help="randomized property battery")
    o.add_argument("--n", type=int, default=50)
    o.add_argument("--seed", type=int, default=0)
    o.add_argument("--family", action="append", choices=sorted(FAMILIES))
    o.add_argument("--grid-points", type=int, default=32)
    o.add_argument("--replay", metavar="FAMILY:SEED")
    o.add_argument("--json", nargs="?", const="-", default=None, metavar="OUT")
    o.set_defaults(func=cmd_oracle)

    v = sub.add_parser("version", help="print the version")
    v.set_defaults(func=lambda args: print(f"shiftframe {__version__}") or 0)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command is None:
        parser.print_usage(sys.stderr)
        return EX_USAGE
    try:
        return args.func(args)
    except SchemaError as exc:
        print(f"schema error: {exc}", file=sys.stderr)
        return EX_DATAERR
    except ShiftFrameError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
