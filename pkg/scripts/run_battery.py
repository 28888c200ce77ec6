"""Run the randomized property battery and write the summary JSON."""

import argparse
import sys
import time

from shiftframe import jsonio
from shiftframe.battery import FAMILIES, oracle_battery


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=200, help="instances per family")
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--grid-points", type=int, default=32)
    ap.add_argument("--family", action="append", choices=sorted(FAMILIES))
    ap.add_argument("--workers", type=int, default=None, help="defaults to SHIFTFRAME_THREADS")
    ap.add_argument("-o", "--output", default="battery_summary.json")
    args = ap.parse_args()

    t0 = time.perf_counter()
    summary = oracle_battery(args.n, args.seed, args.family, args.grid_points, args.workers)
    elapsed = time.perf_counter() - t0
    for fam, e in summary["families"].items():
        print(f"{fam:24s} {e['passed']:5d} passed {e['failed']:3d} failed")
    print(f"{elapsed:.1f}s, summary in {args.output}")
    jsonio.write_file(args.output, summary)
    return 0 if summary["all_passed"] else 1


if __name__ == "__main__":
    sys.exit(main())
