"""Finite-sample quota model.

``N`` states are drawn i.i.d. from the prior.  The Sender commits to message
counts (a quota close to the target message distribution) and then assigns
messages to the realised sample to maximise her payoff.  When the target
profile is strictly credible and strictly R-IC, the optimal assignment
concentrates on the target test as ``N`` grows.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

import numpy as np

from . import transport
from .core import PersuasionProblem, ReceiverStrategy, Test, best_responses

ZERO = Fraction(0)


@dataclass(frozen=True)
class EmpiricalDistribution:
    n: int
    counts: Mapping[str, int]

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("sample size must be positive")
        if any(c < 0 for c in self.counts.values()) or sum(self.counts.values()) != self.n:
            raise ValueError("counts must be nonnegative and sum to the sample size")

    def pmf(self) -> dict[str, Fraction]:
        return {k: Fraction(c, self.n) for k, c in self.counts.items()}


@dataclass(frozen=True)
class AssignmentResult:
    counts: Mapping[tuple[str, str], int]
    value: Fraction

    def pmf(self, n: int) -> dict[tuple[str, str], Fraction]:
        return {c: Fraction(k, n) for c, k in self.counts.items()}


def sample_empirical(prior: Mapping[str, Fraction], n: int, seed: int | np.random.SeedSequence) -> EmpiricalDistribution:
    """Multinomial draw of ``n`` states using a PCG64 generator."""
    if n < 1:
        raise ValueError("sample size must be positive")
    labels = list(prior)
    probs = np.array([float(prior[k]) for k in labels])
    probs = probs / probs.sum()
    rng = np.random.Generator(np.random.PCG64(seed))
    draw = rng.multinomial(n, probs)
    return EmpiricalDistribution(n, {k: int(c) for k, c in zip(labels, draw)})


def nearest_quota(target: Mapping[str, Fraction], n: int) -> EmpiricalDistribution:
    """Count vector summing to ``n`` closest to ``target`` in sup norm.

    Largest-remainder rounding is sup-norm optimal; ties go to the larger
    remainder and then to label order.
    """
    if n < 1:
        raise ValueError("sample size must be positive")
    labels = list(target)
    scaled = {k: Fraction(target[k]) * n for k in labels}
    floors = {k: math.floor(scaled[k]) for k in labels}
    left = n - sum(floors.values())
    order = sorted(range(len(labels)), key=lambda i: (-(scaled[labels[i]] - floors[labels[i]]), i))
    for i in order[:left]:
        floors[labels[i]] += 1
    return EmpiricalDistribution(n, floors)


def sup_distance(a: Mapping, b: Mapping) -> Fraction:
    keys = set(a) | set(b)
    return max((abs(Fraction(a.get(k, 0)) - Fraction(b.get(k, 0))) for k in keys), default=ZERO)


def profile_cost(p: PersuasionProblem, messages: Sequence[str], sigma: ReceiverStrategy) -> dict[tuple[str, str], Fraction]:
    return {(s, m): p.u_s[s, sigma(m)] for s in p.states for m in messages}


def optimal_assignment(
    empirical: EmpiricalDistribution,
    quota: EmpiricalDistribution,
    cost: Mapping[tuple[str, str], Fraction],
) -> AssignmentResult:
    """Integral optimum of the count-level transportation problem.

    The transportation simplex pivots between vertices of the polytope, and
    with integer marginals every vertex is integral.  ``value`` is reported
    per sample point (total payoff divided by ``N``).
    """
    if empirical.n != quota.n:
        raise ValueError("sample sizes differ")
    mu = {k: Fraction(v) for k, v in empirical.counts.items()}
    nu = {k: Fraction(v) for k, v in quota.counts.items()}
    sol = transport.transport_simplex(mu, nu, cost)
    counts = {}
    for cell, v in sol.coupling.joint.items():
        if v.denominator != 1:
            raise AssertionError("non-integral transport vertex")
        counts[cell] = int(v)
    return AssignmentResult(counts, sol.value / empirical.n)


def check_strict_profile(p: PersuasionProblem, t: Test, sigma: ReceiverStrategy) -> tuple[bool, bool]:
    """(strictly credible, strictly R-IC) for a target profile."""
    msgs = [m for m in t.messages if t.message_mass(m) > 0]
    cost = profile_cost(p, msgs, sigma)
    coupling = transport.make_coupling(p.states, msgs, {(s, m): t[s, m] for s in p.states for m in msgs})
    credible = transport.is_unique_optimum(coupling, cost)
    ric = all(best_responses(p, t.posterior(m)) == [sigma(m)] for m in msgs)
    return credible, ric


@dataclass(frozen=True)
class TrialResult:
    distance: Fraction
    joint: Mapping[tuple[str, str], int]


def _one_trial(p, t, sigma, msgs, cost, n, seed_seq) -> TrialResult:
    emp = sample_empirical(p.prior, n, seed_seq)
    quota = nearest_quota({m: t.message_mass(m) for m in msgs}, n)
    res = optimal_assignment(emp, quota, cost)
    target = {(s, m): t[s, m] for s in p.states for m in msgs}
    for s in p.states:
        if sum(res.counts[s, m] for m in msgs) != emp.counts[s]:
            raise AssertionError("row sums broken")
    for m in msgs:
        if sum(res.counts[s, m] for s in p.states) != quota.counts[m]:
            raise AssertionError("column sums broken")
    return TrialResult(sup_distance(res.pmf(n), target), res.counts)


@dataclass(frozen=True)
class SimulationReport:
    n: int
    trials: int
    epsilon: Fraction
    hits: int
    mean_distance: float
    max_distance: Fraction
    empirical_ric: bool
    integral: bool

    @property
    def frequency(self) -> float:
        return self.hits / self.trials

    @property
    def std_error(self) -> float:
        f = self.frequency
        return math.sqrt(f * (1 - f) / self.trials)


def simulate(
    p: PersuasionProblem,
    t: Test,
    sigma: ReceiverStrategy,
    n: int,
    trials: int,
    epsilon,
    seed: int = 0,
    threads: int = 1,
    require_strict: bool = True,
) -> SimulationReport:
    """Monte Carlo hit frequency of ``sup |assignment - target| < epsilon``.

    Trial ``i`` uses the ``i``-th child of ``SeedSequence(seed)``, so results
    do not depend on ``threads``.
    """
    if trials < 1:
        raise ValueError("trials must be at least 1")
    epsilon = Fraction(epsilon)
    if require_strict:
        strict_cred, strict_ric = check_strict_profile(p, t, sigma)
        if not (strict_cred and strict_ric):
            raise ValueError("profile not strictly credible/strictly R-IC")
    msgs = [m for m in t.messages if t.message_mass(m) > 0]
    cost = profile_cost(p, msgs, sigma)
    seeds = np.random.SeedSequence(seed).spawn(trials)

    def run(ss):
        return _one_trial(p, t, sigma, msgs, cost, n, ss)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(run, seeds))
    else:
        results = [run(ss) for ss in seeds]
    hits = sum(1 for r in results if r.distance < epsilon)
    total = {(s, m): sum(r.joint[s, m] for r in results) for s in p.states for m in msgs}
    ric = True
    for m in msgs:
        belief = {s: Fraction(total[s, m]) for s in p.states}
        if sum(belief.values()) > 0 and sigma(m) not in best_responses(p, belief):
            ric = False
    return SimulationReport(
        n=n,
        trials=trials,
        epsilon=epsilon,
        hits=hits,
        mean_distance=sum(float(r.distance) for r in results) / trials,
        max_distance=max(r.distance for r in results),
        empirical_ric=ric,
        integral=True,
    )


@dataclass(frozen=True)
class ConvergenceReport:
    rows: tuple[SimulationReport, ...]

    def nondecreasing(self, k: float = 2.0) -> bool:
        """Hit frequency never drops by more than ``k`` combined standard errors."""
        for a, b in zip(self.rows, self.rows[1:]):
            slack = k * math.sqrt(a.std_error**2 + b.std_error**2)
            if b.frequency < a.frequency - slack:
                return False
        return True

    def to_csv(self) -> str:
        lines = ["N,trials,epsilon,hits,frequency,std_error,mean_distance"]
        for r in self.rows:
            lines.append(f"{r.n},{r.trials},{r.epsilon},{r.hits},{r.frequency:.6f},{r.std_error:.6f},{r.mean_distance:.6f}")
        return "\n".join(lines) + "\n"


def convergence(
    p: PersuasionProblem,
    t: Test,
    sigma: ReceiverStrategy,
    sizes: Sequence[int],
    trials: int,
    epsilon,
    seed: int = 0,
    threads: int = 1,
    require_strict: bool = True,
) -> ConvergenceReport:
    rows = []
    for i, n in enumerate(sizes):
        rows.append(simulate(p, t, sigma, n, trials, epsilon, seed + i, threads, require_strict))
    return ConvergenceReport(tuple(rows))


def strict_school_profile() -> tuple[PersuasionProblem, Test, ReceiverStrategy]:
    """School payoffs with a pass/fail test whose pass posterior makes hiring strictly optimal."""
    from .instances import school

    p = school()
    t = Test(
        ("pass", "fail"),
        {
            ("H", "pass"): Fraction(3, 10),
            ("H", "fail"): ZERO,
            ("L", "pass"): Fraction(1, 5),
            ("L", "fail"): Fraction(1, 2),
        },
    )
    return p, t, ReceiverStrategy({"pass": "Hire", "fail": "NotHire"})
