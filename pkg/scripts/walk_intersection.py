"""Pairwise intersection rate of sampled walk families on a grid, swept over family size."""

import argparse
import csv
import sys

from bramble_forge.flow import solve_concurrent_flow
from bramble_forge.graph import grid
from bramble_forge.sampler import SamplerConfig, sample_bramble


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--side", type=int, default=10)
    ap.add_argument("--ell", type=int, default=6)
    ap.add_argument("--sizes", type=int, nargs="+", default=[5, 10, 20, 40, 80])
    ap.add_argument("--seeds", type=int, default=5)
    args = ap.parse_args(argv)

    g = grid(args.side, args.side)
    hubs = [r * args.side + c for r in range(0, args.side, 3) for c in range(0, args.side, 3)]
    cf = solve_concurrent_flow(g, hubs, iterations=30, seed=0)
    out = csv.writer(sys.stdout)
    out.writerow(["family", "seed", "pairwise_fraction", "valid", "congestion", "order_lb"])
    for size in args.sizes:
        for seed in range(args.seeds):
            cfg = SamplerConfig(k=3 * len(hubs), ell=args.ell, family=size, seed=seed)
            rep = sample_bramble(g, cf, cfg, exact_order=False).report
            out.writerow([size, seed, f"{rep['pairwise_fraction']:.6f}", rep["valid"], rep["congestion"],
                          f"{rep['order_lb']:.4f}"])


if __name__ == "__main__":
    main()
