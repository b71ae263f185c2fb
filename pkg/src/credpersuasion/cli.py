"""Command-line interface.

Every command except ``examples`` prints a JSON report with the command echo,
the SHA-256 of the input, and a results tree in which each number appears as
``{"exact": "p/q", "approx": "..."}``.  Exit codes: 0 success, 1 a ``verify``
verdict was false, 2 bad input.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import time
from fractions import Fraction
from typing import Any, Sequence

from . import __version__, fileio, finite_sample, lemons, solvers, stability
from .core import approx, expected_payoffs, no_information_value, outcome_from_profile, to_scalar, validate_problem
from .fileio import InputError
from .instances import BUILTINS

THREADS_ENV = "CREDPERS_THREADS"


def num(x: Fraction) -> dict[str, str]:
    return {"exact": str(x), "approx": approx(x)}


def cells(seq) -> list[list[str]]:
    return [[str(a), str(b)] for a, b in seq]


def outcome_json(p, o) -> dict[str, Any]:
    return {s: {a: str(o[s, a]) for a in p.actions} for s in p.states}


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None


def _default_threads() -> int:
    raw = os.environ.get(THREADS_ENV, "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="credpersuasion", description="Credible persuasion solver and verifier.")
    ap.add_argument("--version", action="version", version=__version__)
    ap.add_argument("--threads", type=int, default=None, help=f"worker threads (default ${THREADS_ENV} or 1)")
    ap.add_argument("--timing", action="store_true", help="include wall-clock timing in the report")
    sub = ap.add_subparsers(dest="command", required=True)

    def with_file(name, help_):
        sp = sub.add_parser(name, help=help_)
        sp.add_argument("file", nargs="?", default="-", help="problem file (default: stdin)")
        return sp

    with_file("validate", "check a problem file")
    with_file("analyze", "modularity classes and structural predictions")
    sp = with_file("verify", "stability of an outcome, or credibility/R-IC of a profile")
    g = sp.add_mutually_exclusive_group(required=True)
    g.add_argument("--outcome", help="outcome file")
    g.add_argument("--profile", help="profile file (messages, test, sigma)")
    sp = with_file("solve", "Sender-optimal outcomes")
    sp.add_argument("--mode", choices=["commitment", "stable", "bruteforce"], default="stable")
    sp.add_argument("--support-mode", choices=["auto", "maximal-general", "comonotone-only"], default="auto")
    sp.add_argument("--grid", type=int, default=20, help="grid for bruteforce mode")
    sp.add_argument("--outcome-out", help="write the optimal outcome to this file")
    sp = with_file("concavify", "two-state concavification")
    sp.add_argument("--csv", help="write mu,v,envelope rows to this file ('-' for stdout instead of the report)")
    sp.add_argument("--selection", choices=["sender-best", "sender-worst"], default="sender-best")
    sp = with_file("lemons", "market for lemons")
    sp.add_argument("--cmd", choices=["benchmark", "evaluate", "credible", "fuzz"], required=True)
    sp.add_argument("--test", choices=["file", "uninformative", "revealing"], default="file")
    sp.add_argument("--trials", type=int, default=1000)
    sp.add_argument("--seed", type=int, default=0)
    sp = with_file("finite-sample", "Monte Carlo check of finite-sample convergence")
    sp.add_argument("--profile", required=True, help="profile file (messages, test, sigma)")
    sp.add_argument("-N", dest="sizes", type=int, action="append", required=True, help="sample size (repeatable)")
    sp.add_argument("--trials", type=int, default=200)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--epsilon", default="1/20")
    sp.add_argument("--csv", help="write the convergence table to this file")
    sp = sub.add_parser("examples", help="print a built-in instance as a problem file")
    sp.add_argument("--name", choices=sorted(BUILTINS) + ["lemons"], required=True)
    return ap


def _write(path: str, text: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)


def cmd_validate(args, text):
    doc = fileio.parse_document(text)
    p = fileio.problem_from_doc(doc)
    rep = validate_problem(p)
    if not rep.ok:
        raise InputError("; ".join(rep.errors))
    return {"valid": True, "states": list(p.states), "actions": list(p.actions)}, 0


def cmd_analyze(args, text):
    p = _problem(text)
    commit = solvers.solve_full_commitment(p)
    pr = stability.structural_report(p, commit.value)
    out = {
        "sender_class": _class_json(pr.sender_class),
        "receiver_class": _class_json(pr.receiver_class),
        "premises": pr.premises,
        "conclusions": list(pr.conclusions),
        "warnings": list(pr.warnings),
        "no_information_best": num(pr.no_info_best),
        "fully_revealing": num(pr.fully_revealing_value),
        "full_commitment": num(commit.value),
    }
    return out, 0


def _class_json(c):
    if c is None:
        return None
    return {"kind": c.kind, "state_order": list(c.state_order), "action_order": list(c.action_order)}


def _stability_json(p, rep) -> dict[str, Any]:
    ob = rep.obedience
    out: dict[str, Any] = {
        "stable": rep.stable,
        "obedient": ob.holds,
        "slacks": {a: {a2: num(v) for a2, v in rows} for a, rows in ob.per_action.items()},
        "obedience_violations": cells(ob.violations),
        "cyclically_monotone": rep.cm.holds,
    }
    if rep.cm.holds:
        out["potentials"] = {k: num(v) for k, v in rep.cm.potentials.items()}
    else:
        out["witness"] = {"cycle": cells(rep.cm.witness), "violation": num(rep.cm.violation)}
    return out


def cmd_verify(args, text):
    p = _problem(text)
    if args.outcome:
        o = fileio.load_outcome(p, _read(args.outcome))
        rep = stability.is_stable(p, o)
        out = _stability_json(p, rep)
        s, r = expected_payoffs(p, o)
        out["payoffs"] = {"sender": num(s), "receiver": num(r)}
        if p.state_order is not None and p.action_order is not None:
            ok, pair = stability.is_comonotone(p, o)
            out["comonotone"] = ok
            if pair:
                out["crossed_pair"] = cells(pair)
        return out, 0 if rep.stable else 1
    t, sigma = fileio.load_profile(p, _read(args.profile))
    credible = stability.is_credible_profile(p, t, sigma)
    ric = stability.is_ric_profile(p, t, sigma)
    spne = stability.check_spne_outcome(p, t, sigma)
    induced = outcome_from_profile(p, t, sigma)
    out = {
        "credible": credible,
        "receiver_ic": ric,
        "spne_outcome": spne,
        "induced_outcome": outcome_json(p, induced),
        "induced_outcome_stability": _stability_json(p, stability.is_stable(p, induced)),
    }
    return out, 0 if (credible and ric) else 1


def cmd_solve(args, text):
    p = _problem(text)
    noinfo = no_information_value(p, "best")
    if args.mode == "commitment":
        res = solvers.solve_full_commitment(p)
        out = {"value": num(res.value), "outcome": outcome_json(p, res.outcome)}
        outcome = res.outcome
    elif args.mode == "stable":
        res = solvers.solve_optimal_stable(p, args.support_mode)
        out = {
            "value": num(res.value),
            "outcome": outcome_json(p, res.outcome),
            "support": cells(res.support.cells),
            "support_mode": res.mode,
            "supports_checked": res.supports_checked,
        }
        outcome = res.outcome
    else:
        value = solvers.brute_force_optimal_stable(p, args.grid)
        out = {"value": num(value), "grid": args.grid}
        outcome = None
    value = Fraction(out["value"]["exact"])
    out["no_information_best"] = num(noinfo)
    if value == noinfo:
        out["note"] = "equals no-information benchmark"
    if args.outcome_out and outcome is not None:
        _write(args.outcome_out, fileio.dump_outcome(p, outcome))
    return out, 0


def cmd_concavify(args, text):
    p = _problem(text)
    env = solvers.concavify_two_state(p, args.selection)
    if args.csv and args.csv != "-":
        _write(args.csv, env.to_csv())
    out = {
        "belief": f"P({env.high_state})",
        "selection": env.selection,
        "thresholds": [num(x) for x in env.thresholds],
        "regions": [{"from": num(a), "to": num(b), "action": act} for a, b, act in env.intervals],
        "points": [
            {"mu": num(pt.mu), "v": num(pt.v), "envelope": num(pt.envelope), "best_responses": list(pt.actions)}
            for pt in env.points
        ],
        "hull": [[num(x), num(y)] for x, y in env.hull],
        "prior": num(env.prior_mu),
        "value_at_prior": num(env.value_at_prior),
    }
    return out, 0


def _lemons_test(args, lp, t):
    if args.test == "uninformative":
        return lemons.uninformative_test(lp)
    if args.test == "revealing":
        return lemons.fully_revealing_test(lp)
    if t is None:
        raise InputError("no test in the lemons file; pass --test uninformative|revealing")
    return t


def _equilibrium_json(eq) -> dict[str, Any]:
    return {
        "prices": {m: num(v) for m, v in eq.prices.items()},
        "traded": {m: [str(x) for x in ts] for m, ts in eq.traded.items()},
        "seller_payoff": num(eq.seller_payoff),
    }


def cmd_lemons(args, text):
    lp, t = fileio.load_lemons(text)
    bench = lemons.no_info_benchmark(lp)
    out: dict[str, Any] = {"p0": num(bench.p0), "R0": num(bench.r0), "fixed_points": [num(x) for x in bench.fixed_points]}
    if args.cmd == "evaluate":
        out["equilibrium"] = _equilibrium_json(lemons.evaluate_test(lp, _lemons_test(args, lp, t)))
    elif args.cmd == "credible":
        res = lemons.check_credibility(lp, _lemons_test(args, lp, t))
        out["credible"] = res.credible
        out["equilibrium"] = _equilibrium_json(res.equilibrium)
        if not res.credible:
            out["witness"] = {"cycle": cells(res.witness), "violation": num(res.violation)}
    elif args.cmd == "fuzz":
        rep = lemons.fuzz_proposition(lp, args.trials, args.seed)
        out["fuzz"] = {
            "trials": rep.trials,
            "seed": rep.seed,
            "credible_tests": rep.credible,
            "credible_above_R0": rep.violations,
            "max_credible_payoff": num(rep.max_credible_payoff) if rep.max_credible_payoff is not None else None,
            "max_payoff": num(rep.max_payoff),
        }
    return out, 0


def cmd_finite_sample(args, text):
    p = _problem(text)
    t, sigma = fileio.load_profile(p, _read(args.profile))
    try:
        eps = to_scalar(args.epsilon)
    except ValueError as exc:
        raise InputError(f"--epsilon: {exc}") from None
    rep = finite_sample.convergence(p, t, sigma, args.sizes, args.trials, eps, args.seed, args.threads)
    if args.csv:
        _write(args.csv, rep.to_csv())
    rows = [
        {
            "N": r.n,
            "trials": r.trials,
            "hits": r.hits,
            "frequency": r.frequency,
            "std_error": r.std_error,
            "max_distance": num(r.max_distance),
            "empirical_receiver_ic": r.empirical_ric,
        }
        for r in rep.rows
    ]
    return {"epsilon": num(eps), "rows": rows, "nondecreasing_2se": rep.nondecreasing()}, 0


def _problem(text):
    doc = fileio.parse_document(text)
    p = fileio.problem_from_doc(doc)
    rep = validate_problem(p)
    if not rep.ok:
        raise InputError("; ".join(rep.errors))
    return p


COMMANDS = {
    "validate": cmd_validate,
    "analyze": cmd_analyze,
    "verify": cmd_verify,
    "solve": cmd_solve,
    "concavify": cmd_concavify,
    "lemons": cmd_lemons,
    "finite-sample": cmd_finite_sample,
}


def run(argv: Sequence[str] | None = None, stdout=None) -> int:
    stdout = stdout or sys.stdout
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.threads is None:
        args.threads = _default_threads()
    if args.command == "examples":
        if args.name == "lemons":
            stdout.write(fileio.dump_lemons(lemons.running_example()))
        else:
            stdout.write(fileio.dump_problem(BUILTINS[args.name]()))
        return 0
    try:
        text = _read(args.file)
        start = time.perf_counter()
        results, code = COMMANDS[args.command](args, text)
        elapsed = time.perf_counter() - start
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if args.command == "concavify" and args.csv == "-":
        stdout.write(solvers.concavify_two_state(_problem(text), args.selection).to_csv())
        return code
    report: dict[str, Any] = {
        "command": args.command,
        "argv": list(argv) if argv is not None else sys.argv[1:],
        "input_sha256": hashlib.sha256(text.encode("utf-8")).hexdigest(),
        "results": results,
    }
    if args.timing:
        report["timing_seconds"] = round(elapsed, 6)
    stdout.write(json.dumps(report, indent=2) + "\n")
    return code


def main() -> None:
    sys.exit(run())
