"""Fuzz random tests in the lemons market and report how many credible ones beat R0."""

from __future__ import annotations

import argparse
import time

from credpersuasion.core import fmt
from credpersuasion.lemons import check_credibility, fully_revealing_test, fuzz_proposition, running_example


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--trials", type=int, default=1000)
    ap.add_argument("--seed", type=int, default=2024)
    args = ap.parse_args()
    lp = running_example()
    full = check_credibility(lp, fully_revealing_test(lp))
    print(f"full disclosure payoff {fmt(full.equilibrium.seller_payoff)}, credible {full.credible}")
    t0 = time.perf_counter()
    rep = fuzz_proposition(lp, args.trials, seed=args.seed)
    print(f"R0 {fmt(rep.r0)}; {rep.trials} tests, {rep.credible} credible, {rep.violations} credible above R0")
    print(f"max credible payoff {fmt(rep.max_credible_payoff)}, max payoff {fmt(rep.max_payoff)} ({time.perf_counter() - t0:.1f}s)")


if __name__ == "__main__":
    main()
