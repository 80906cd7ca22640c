"""Miss probability of a growing vertex set X against walk length, with Wilson intervals."""

import argparse
import csv
import sys

import numpy as np

from bramble_forge.flow import solve_concurrent_flow
from bramble_forge.graph import grid
from bramble_forge.sampler import estimate_miss_probability, hit_probability


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--side", type=int, default=8)
    ap.add_argument("--ells", type=int, nargs="+", default=[1, 2, 4, 8, 16])
    ap.add_argument("--xsizes", type=int, nargs="+", default=[1, 2, 4, 8])
    ap.add_argument("--trials", type=int, default=5000)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)

    g = grid(args.side, args.side)
    hubs = list(range(0, g.n, 5))
    cf = solve_concurrent_flow(g, hubs, iterations=30, seed=args.seed)
    # X grows along the vertices most likely to be hit
    ranked = sorted(range(g.n), key=lambda v: -hit_probability(cf, v))
    out = csv.writer(sys.stdout)
    out.writerow(["ell", "x_size", "miss", "lo", "hi", "segment_hit_bound"])
    for size in args.xsizes:
        x = ranked[:size]
        bound = min(1.0, float(np.sum([hit_probability(cf, v) for v in x])))
        for ell in args.ells:
            est = estimate_miss_probability(cf, ell, x, args.trials, seed=args.seed)
            out.writerow([ell, size, f"{est.p:.5f}", f"{est.lo:.5f}", f"{est.hi:.5f}", f"{bound:.5f}"])


if __name__ == "__main__":
    main()
