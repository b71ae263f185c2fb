"""Monte Carlo: how often the empirical stable outcome lands near the target as N grows."""

from __future__ import annotations

import argparse
import sys
from fractions import Fraction

from credpersuasion.finite_sample import convergence, strict_school_profile


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("-N", type=int, action="append", dest="sizes")
    ap.add_argument("--trials", type=int, default=200)
    ap.add_argument("--epsilon", default="1/20")
    ap.add_argument("--seed", type=int, default=7)
    ap.add_argument("--threads", type=int, default=1)
    ap.add_argument("--out", default="-")
    args = ap.parse_args()
    p, t, s = strict_school_profile()
    rep = convergence(p, t, s, args.sizes or [100, 1000, 10000], args.trials, Fraction(args.epsilon), seed=args.seed, threads=args.threads)
    text = rep.to_csv()
    if args.out == "-":
        sys.stdout.write(text)
    else:
        with open(args.out, "w") as fh:
            fh.write(text)
    print(f"nondecreasing within 2 SE: {rep.nondecreasing(2.0)}", file=sys.stderr)


if __name__ == "__main__":
    main()
