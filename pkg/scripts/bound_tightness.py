"""How loose are the guaranteed bounds?  Ratios of estimated to oracle
bounds over seeded gapped fiber instances, grouped by r."""

import argparse
from collections import defaultdict

import numpy as np

from shiftframe.battery import derive_seed
from shiftframe.instances import generate_instance, load_instance, random_spec
from shiftframe.sampling import check_characterization


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=100)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--grid-points", type=int, default=32)
    args = ap.parse_args()

    lower, upper = defaultdict(list), defaultdict(list)
    for i in range(args.n):
        seed = derive_seed(args.seed, "tightness", i)
        inst = load_instance(generate_instance(random_spec(seed, args.grid_points))).instance
        rep = check_characterization(inst, 0.1)
        if rep.estimated_bounds is None:
            continue
        r = rep.details["r"]
        lower[r].append(rep.estimated_bounds.lower / rep.true_bounds.lower)
        upper[r].append(rep.estimated_bounds.upper / rep.true_bounds.upper)
    print(" r  count  median est/true lower  median est/true upper")
    for r in sorted(lower):
        print(f"{r:2d}  {len(lower[r]):5d}  {np.median(lower[r]):21.3e}  {np.median(upper[r]):21.3e}")


if __name__ == "__main__":
    main()
