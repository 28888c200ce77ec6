"""Acceptance suite: nine criteria, each printing one PASS/FAIL line.

Run directly (``python tests/test_acceptance.py``) or under pytest.
"""

import subprocess
import sys
import time

import pytest

from shiftframe.battery import derive_seed, oracle_battery, sdiag_structure
from shiftframe.instances import packaged_example_path
from shiftframe.pipeline import full_pipeline

SEED = 1


def _battery(family, n):
    t0 = time.perf_counter()
    res = oracle_battery(n, SEED, [family], workers=1)["families"][family]
    return res, time.perf_counter() - t0


def _line(res):
    seeds = [f["seed"] for f in res["failures"][:3]]
    return f"{res['passed']}/{res['passed'] + res['failed']}" + (f" failing seeds {seeds}" if seeds else "")


def c1_fd_equivalence():
    res, dt = _battery("fd-equivalence", 200)
    return res["failed"] == 0 and dt < 10.0, f"{_line(res)} agree, {dt:.2f}s (limit 10s)"


def c2_fd_necessary():
    res, _ = _battery("fd-necessary", 200)
    return res["failed"] == 0, f"{_line(res)} within [A/C, B/C]"


def c3_interpolation():
    res, _ = _battery("interpolation-operators", 100)
    return res["failed"] == 0, f"{_line(res)} with |TM - I| <= 1e-10 and norm bounds"


def c4_fd_sufficient():
    res, _ = _battery("fd-sufficient", 200)
    return res["failed"] == 0, f"{_line(res)} bracketed"


def c5_sdiag_structure():
    t0 = time.perf_counter()
    fails = []
    for i in range(100):
        seed = derive_seed(SEED, "sdiag-structure", i)
        out = sdiag_structure(seed, 256)
        if not out["pass"]:
            fails.append(seed)
    dt = time.perf_counter() - t0
    return not fails and dt < 60.0, f"{100 - len(fails)}/100 at M=256, {dt:.1f}s (limit 60s)" + (
        f" failing seeds {fails[:3]}" if fails else "")


def c6_fiber_characterization():
    res, _ = _battery("fiber-characterization", 100)
    planted, _ = _battery("fiber-planted", 20)
    ok = res["failed"] == 0 and planted["failed"] == 0
    return ok, f"{_line(res)} equivalence and brackets; planted {_line(planted)} not-a-frame on both sides"


def c7_constant_reduction():
    res, _ = _battery("constant-reduction", 50)
    return res["failed"] == 0, f"{_line(res)} match the single-fiber results to 1e-10"


def c8_worked_example():
    rep = full_pipeline(str(packaged_example_path()))
    q = rep["quantities"]
    close = lambda x, y: abs(x - y) <= 1e-12  # noqa: E731
    nec = rep["necessary"]
    ch = rep["characterization"]
    checks = {
        "l=2": q["length"] == 2,
        "r=2": q["r"] == 2,
        "c=2": close(q["gap"], 2.0),
        "|L|=1": close(q["op_norm"], 1.0),
        "per-V bounds (1/2,1/2)": all(close(n["true_bounds"]["lower"], 0.5) and close(n["true_bounds"]["upper"], 0.5)
                                      for n in nec) and len(nec) == 2,
        "necessary lower 1/2": all(close(n["estimated_bounds"]["lower"], 0.5) and n["verdict"] for n in nec),
        "estimate (1/8,2)": close(ch["estimated_bounds"]["lower"], 0.125) and close(ch["estimated_bounds"]["upper"], 2.0),
        "true (1,1)": close(ch["true_bounds"]["lower"], 1.0) and close(ch["true_bounds"]["upper"], 1.0),
        "verdicts": rep["verdicts"]["all"],
    }
    bad = [k for k, v in checks.items() if not v]
    return not bad, "all quantities reproduced" if not bad else f"mismatched: {bad}"


def c9_determinism():
    cmd = [sys.executable, "-m", "shiftframe.cli", "oracle", "--n", "50", "--seed", "1", "--json"]
    runs = [subprocess.run(cmd, capture_output=True, check=False) for _ in range(2)]
    same = runs[0].stdout == runs[1].stdout and len(runs[0].stdout) > 0
    ok = same and all(r.returncode == 0 for r in runs)
    return ok, f"{len(runs[0].stdout)} bytes, identical={same}, exit codes {[r.returncode for r in runs]}"


CRITERIA = [
    ("1 finite equivalence", c1_fd_equivalence),
    ("2 necessary bracket", c2_fd_necessary),
    ("3 interpolation operators", c3_interpolation),
    ("4 sufficient bracket", c4_fd_sufficient),
    ("5 s-diagonalization structure", c5_sdiag_structure),
    ("6 gapped characterization", c6_fiber_characterization),
    ("7 constant-fiber reduction", c7_constant_reduction),
    ("8 worked example", c8_worked_example),
    ("9 determinism", c9_determinism),
]


def _report(name, ok, detail):
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {name}: {detail}"
    print(line)
    return line


@pytest.mark.parametrize("name, fn", CRITERIA, ids=[c[0].split(" ", 1)[1].replace(" ", "-") for c in CRITERIA])
def test_criterion(name, fn, capsys):
    ok, detail = fn()
    with capsys.disabled():
        print()
        _report(name, ok, detail)
    assert ok, detail


if __name__ == "__main__":
    results = [fn() for _, fn in CRITERIA]
    for (name, _), (ok, detail) in zip(CRITERIA, results):
        _report(name, ok, detail)
    sys.exit(0 if all(ok for ok, _ in results) else 1)
