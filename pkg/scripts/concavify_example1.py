"""Write the indirect-utility curve and its concave envelope for the four-action example."""

from __future__ import annotations

import argparse
import sys
from fractions import Fraction

from credpersuasion.core import fmt
from credpersuasion.instances import example1
from credpersuasion.solvers import concavify_two_state


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--prior-high", default="3/5")
    ap.add_argument("--out", default="-", help="CSV path, '-' for stdout")
    args = ap.parse_args()
    env = concavify_two_state(example1(Fraction(args.prior_high)))
    text = env.to_csv()
    if args.out == "-":
        sys.stdout.write(text)
    else:
        with open(args.out, "w") as fh:
            fh.write(text)
    print(f"thresholds {[fmt(t) for t in env.thresholds]}, envelope at prior {fmt(env.value_at_prior)}", file=sys.stderr)


if __name__ == "__main__":
    main()
