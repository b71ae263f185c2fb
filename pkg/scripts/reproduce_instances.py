"""Solve the built-in instances and print a summary table."""

from __future__ import annotations

from credpersuasion.core import fmt, no_information_value
from credpersuasion.instances import BUILTINS
from credpersuasion.solvers import solve_full_commitment, solve_optimal_stable
from credpersuasion.stability import is_stable


def main() -> None:
    print(f"{'instance':<10} {'commitment':>11} {'stable':>8} {'no-info':>8}  commitment outcome stable?")
    for name, make in BUILTINS.items():
        p = make()
        commit = solve_full_commitment(p)
        best = solve_optimal_stable(p)
        rep = is_stable(p, commit.outcome)
        note = "yes" if rep.stable else f"no, witness {rep.cm.witness} gain {fmt(rep.cm.violation)}"
        print(f"{name:<10} {fmt(commit.value):>11} {fmt(best.value):>8} {fmt(no_information_value(p)):>8}  {note}")


if __name__ == "__main__":
    main()
