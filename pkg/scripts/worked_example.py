"""Print every intermediate quantity of the diag(1, -1) example next to its
hand-computed value."""

import argparse

from shiftframe.instances import diag_example
from shiftframe.pipeline import full_pipeline

EXPECTED = {
    "length": 2,
    "r": 2,
    "gap": 2.0,
    "padding_constant": 2.0,
    "op_norm": 1.0,
}


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--grid-points", type=int, default=8)
    args = ap.parse_args()

    rep = full_pipeline(diag_example(args.grid_points))
    q = rep["quantities"]
    for key, want in EXPECTED.items():
        print(f"{key:18s} got {q[key]!s:8s} expected {want}")
    it = rep["iterates"]["bounds"]
    print(f"{'iterate bounds':18s} got ({it['lower']:.6g}, {it['upper']:.6g}) expected (1, 1)")
    for s, nec in enumerate(rep["necessary"], start=1):
        tb, eb = nec["true_bounds"], nec["estimated_bounds"]
        print(f"{'V_' + str(s) + ' bounds':18s} got ({tb['lower']:.6g}, {tb['upper']:.6g}) expected (0.5, 0.5); "
              f"necessary lower {eb['lower']:.6g} expected 0.5")
    eb = rep["characterization"]["estimated_bounds"]
    print(f"{'estimated iterate':18s} got ({eb['lower']:.6g}, {eb['upper']:.6g}) expected (0.125, 2)")
    print(f"verdicts: {rep['verdicts']}")


if __name__ == "__main__":
    main()
