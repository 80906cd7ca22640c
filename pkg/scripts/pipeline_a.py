"""Congestion-2 brambles from grid path-of-sets systems: size, congestion and timing per (h, r)."""

import argparse
import csv
import sys
import time

from bramble_forge.bramble import congestion, verify_bramble
from bramble_forge.errors import BrambleForgeError
from bramble_forge.pathsets import embed_and_assemble, grid_system


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--hs", type=int, nargs="+", default=[4, 8, 16])
    ap.add_argument("--r", type=int, default=40)
    ap.add_argument("--seeds", type=int, default=3)
    args = ap.parse_args(argv)

    out = csv.writer(sys.stdout)
    out.writerow(["h", "r", "seed", "t", "rounds", "valid", "congestion", "seconds", "error"])
    for h in args.hs:
        _, system = grid_system(h, args.r)
        for seed in range(args.seeds):
            start = time.perf_counter()
            try:
                b, art = embed_and_assemble(system, seed=seed)
            except BrambleForgeError as exc:
                out.writerow([h, args.r, seed, "", "", "", "", f"{time.perf_counter() - start:.3f}",
                              type(exc).__name__])
                continue
            elapsed = time.perf_counter() - start
            out.writerow([h, args.r, seed, len(b), art.game.rounds, bool(verify_bramble(system.host, b)),
                          congestion(system.host, b)[0], f"{elapsed:.3f}", ""])


if __name__ == "__main__":
    main()
