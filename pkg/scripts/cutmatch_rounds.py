"""Rounds needed by the cut-matching game against random and adversarial matching players."""

import argparse
import csv
import math
import sys

from bramble_forge.cutmatch import AdversarialMatchingPlayer, RandomMatchingPlayer, default_max_rounds, run_game
from bramble_forge.errors import MaxRoundsExceeded


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--hs", type=int, nargs="+", default=[8, 16, 32, 64, 128])
    ap.add_argument("--seeds", type=int, default=5)
    ap.add_argument("--alpha", type=float, default=0.25)
    args = ap.parse_args(argv)

    out = csv.writer(sys.stdout)
    out.writerow(["h", "player", "seed", "rounds", "alpha", "method", "converged", "log2h_sq"])
    for h in args.hs:
        for name in ("random", "adversarial"):
            for seed in range(args.seeds):
                player = RandomMatchingPlayer([seed, 1]) if name == "random" else AdversarialMatchingPlayer()
                try:
                    res, ok = run_game(h, player, target_alpha=args.alpha, seed=seed), True
                except MaxRoundsExceeded as exc:
                    res, ok = exc.partial, False
                out.writerow([h, name, seed, res.rounds, f"{res.certificate.alpha:.4f}", res.certificate.method,
                              ok, f"{math.log2(h) ** 2:.2f}"])
    sys.stderr.write(f"round caps: {[default_max_rounds(h) for h in args.hs]}\n")


if __name__ == "__main__":
    main()
