"""Market for lemons on a finite type grid.

A seller knows the quality ``theta`` of her car and values it at ``theta``;
two competing buyers value it at ``v(theta) > theta``.  With the seller asking
her own value (the weakly dominant ask), the price after message ``m`` is the
largest fixed point of ``phi(x) = E[v | theta <= x]`` under the posterior.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from . import transport
from .core import to_scalar

ZERO = Fraction(0)
ONE = Fraction(1)


@dataclass(frozen=True)
class LemonsProblem:
    types: tuple[Fraction, ...]
    prior: Mapping[Fraction, Fraction]
    v: Mapping[Fraction, Fraction]

    @classmethod
    def build(cls, types: Sequence, prior: Sequence, v: Sequence) -> LemonsProblem:
        ts = tuple(to_scalar(t) for t in types)
        if not (len(ts) == len(prior) == len(v)):
            raise ValueError("types, prior and v must have equal length")
        return cls(ts, {t: to_scalar(q) for t, q in zip(ts, prior)}, {t: to_scalar(x) for t, x in zip(ts, v)})

    @classmethod
    def shifted(cls, types: Sequence, prior: Sequence, gain) -> LemonsProblem:
        """Buyer value ``v(theta) = theta + gain``."""
        g = to_scalar(gain)
        return cls.build(types, prior, [to_scalar(t) + g for t in types])

    def labels(self) -> list[str]:
        return [str(t) for t in self.types]

    def validate(self) -> list[str]:
        errs = []
        ts = self.types
        if not ts:
            errs.append("no types")
        if any(a >= b for a, b in zip(ts, ts[1:])):
            errs.append("types not strictly increasing")
        if any(t < 0 or t > 1 for t in ts):
            errs.append("types outside [0, 1]")
        if any(self.prior[t] <= 0 for t in ts):
            errs.append("prior not full support")
        if sum(self.prior.values(), ZERO) != 1:
            errs.append(f"prior sums to {sum(self.prior.values(), ZERO)}")
        if any(self.v[a] >= self.v[b] for a, b in zip(ts, ts[1:])):
            errs.append("v not strictly increasing")
        if any(self.v[t] <= t for t in ts):
            errs.append("no gain from trade at some type")
        if sum((self.prior[t] * self.v[t] for t in ts), ZERO) >= 1:
            errs.append("invariant violated: E[v] >= 1 under the prior")
        return errs

    def require_valid(self) -> None:
        errs = self.validate()
        if errs:
            raise ValueError("; ".join(errs))


def phi(lp: LemonsProblem, mu: Mapping[Fraction, Fraction], x) -> Fraction:
    """``E_mu[v | theta <= x]``; below the support this is ``v`` at the lowest supported type."""
    x = to_scalar(x)
    supp = [t for t in lp.types if mu.get(t, ZERO) > 0]
    if not supp:
        raise ValueError("empty belief")
    below = [t for t in supp if t <= x]
    if not below:
        return lp.v[supp[0]]
    mass = sum((mu[t] for t in below), ZERO)
    return sum((mu[t] * lp.v[t] for t in below), ZERO) / mass


def largest_fixed_point(lp: LemonsProblem, mu: Mapping[Fraction, Fraction], require_interior: bool = True) -> Fraction:
    """Iterate ``x <- phi(x)`` from ``x = 1``; the sequence decreases to the largest fixed point.

    With ``require_interior`` the belief must satisfy ``E_mu[v] < 1``, which is
    what places the fixed point inside the unit interval.
    """
    supp = [t for t in lp.types if mu.get(t, ZERO) > 0]
    mean = sum((mu[t] * lp.v[t] for t in supp), ZERO) / sum((mu[t] for t in supp), ZERO)
    if require_interior and mean >= 1:
        raise ValueError("invariant violated: E[v] >= 1")
    x = max(ONE, mean)
    while True:
        nxt = phi(lp, mu, x)
        if nxt == x:
            break
        if nxt > x:
            raise AssertionError("fixed-point iteration increased")
        x = nxt
    # phi is a step function; any larger fixed point would be one of its values
    for cand in _phi_values(lp, mu):
        if cand > x and phi(lp, mu, cand) >= cand:
            raise AssertionError(f"missed a larger fixed point {cand}")
    return x


def _phi_values(lp, mu) -> list[Fraction]:
    supp = [t for t in lp.types if mu.get(t, ZERO) > 0]
    return sorted({phi(lp, mu, t) for t in supp})


def all_fixed_points(lp: LemonsProblem, mu: Mapping[Fraction, Fraction]) -> list[Fraction]:
    """Every ``x >= 0`` with ``phi(x) = x``, ascending.

    ``phi`` only takes the values ``phi(theta_i)``, so those are the only candidates.
    """
    return [c for c in _phi_values(lp, mu) if phi(lp, mu, c) == c]


@dataclass(frozen=True)
class NoInfoBenchmark:
    p0: Fraction
    r0: Fraction
    fixed_points: tuple[Fraction, ...]


def no_info_benchmark(lp: LemonsProblem) -> NoInfoBenchmark:
    lp.require_valid()
    p0 = largest_fixed_point(lp, lp.prior)
    r0 = sum((lp.prior[t] * max(t, p0) for t in lp.types), ZERO)
    return NoInfoBenchmark(p0, r0, tuple(all_fixed_points(lp, lp.prior)))


@dataclass(frozen=True)
class LemonsTest:
    """Joint pmf over types × messages."""

    messages: tuple[str, ...]
    joint: Mapping[tuple[Fraction, str], Fraction]

    def __getitem__(self, cell) -> Fraction:
        return self.joint.get(cell, ZERO)

    def message_mass(self, m: str) -> Fraction:
        return sum((v for (t, mm), v in self.joint.items() if mm == m), ZERO)

    def posterior(self, m: str) -> dict[Fraction, Fraction]:
        mass = self.message_mass(m)
        return {t: v / mass for (t, mm), v in self.joint.items() if mm == m and v > 0}


def make_lemons_test(lp: LemonsProblem, messages: Sequence[str], joint: Mapping) -> LemonsTest:
    msgs = tuple(messages)
    j = {}
    for (t, m), v in joint.items():
        t = to_scalar(t)
        if t not in lp.prior or m not in msgs:
            raise ValueError(f"unknown cell ({t}, {m})")
        v = to_scalar(v)
        if v < 0:
            raise ValueError("negative test entry")
        if v:
            j[t, m] = j.get((t, m), ZERO) + v
    for t in lp.types:
        row = sum((v for (tt, _), v in j.items() if tt == t), ZERO)
        if row != lp.prior[t]:
            raise ValueError(f"test marginal at type {t} is {row}, prior is {lp.prior[t]}")
    return LemonsTest(msgs, j)


def uninformative_test(lp: LemonsProblem) -> LemonsTest:
    return LemonsTest(("m0",), {(t, "m0"): lp.prior[t] for t in lp.types})


def fully_revealing_test(lp: LemonsProblem) -> LemonsTest:
    msgs = tuple(f"m{i}" for i in range(len(lp.types)))
    return LemonsTest(msgs, {(t, m): lp.prior[t] for t, m in zip(lp.types, msgs)})


@dataclass(frozen=True)
class LemonsEquilibrium:
    prices: Mapping[str, Fraction]
    seller_payoff: Fraction
    traded: Mapping[str, tuple[Fraction, ...]]
    resold_payoff: Fraction = field(default=ZERO)


def evaluate_test(lp: LemonsProblem, t: LemonsTest) -> LemonsEquilibrium:
    """Per-message prices, traded sets and the seller's payoff at the dominant ask.

    Posteriors after individual messages may have ``E[v] >= 1``; the price is
    then the largest fixed point at or above 1, found by the same iteration.
    """
    prices: dict[str, Fraction] = {}
    traded: dict[str, tuple[Fraction, ...]] = {}
    payoff = ZERO
    resold = ZERO
    for m in t.messages:
        mass = t.message_mass(m)
        if mass == 0:
            continue
        post = t.posterior(m)
        price = largest_fixed_point(lp, post, require_interior=False)
        if phi(lp, post, price) != price:
            raise AssertionError("price is not a fixed point")
        prices[m] = price
        traded[m] = tuple(x for x in lp.types if x in post and x <= price)
        payoff += sum((v * max(th, price) for (th, mm), v in t.joint.items() if mm == m), ZERO)
        part = sum((q * (lp.v[th] if th <= price else th) for th, q in post.items()), ZERO)
        resold += part * mass
    return LemonsEquilibrium(prices, payoff, traded, resold)


@dataclass(frozen=True)
class CredibilityResult:
    credible: bool
    witness: tuple[tuple[Fraction, str], ...] | None
    violation: Fraction | None
    equilibrium: LemonsEquilibrium


def check_credibility(lp: LemonsProblem, t: LemonsTest) -> CredibilityResult:
    """Cyclical monotonicity of the test under the seller's cost ``max(theta, p(m))``."""
    eq = evaluate_test(lp, t)
    msgs = [m for m in t.messages if m in eq.prices]
    rows = lp.labels()
    cost = {(str(th), m): max(th, eq.prices[m]) for th in lp.types for m in msgs}
    joint = {(str(th), m): v for (th, m), v in t.joint.items() if m in eq.prices}
    coupling = transport.make_coupling(rows, msgs, joint)
    rep = transport.check_cyclical_monotonicity(coupling, cost)
    if rep.holds:
        return CredibilityResult(True, None, None, eq)
    by_label = {str(th): th for th in lp.types}
    witness = tuple((by_label[r], m) for r, m in rep.witness)
    return CredibilityResult(False, witness, rep.violation, eq)


@dataclass(frozen=True)
class FuzzReport:
    trials: int
    seed: int
    credible: int
    violations: int
    r0: Fraction
    max_credible_payoff: Fraction | None
    max_payoff: Fraction


def random_test(lp: LemonsProblem, rng: random.Random) -> LemonsTest:
    """Random test with 2 to 4 messages.

    Each type's prior mass is split across messages in proportion to integer
    weights drawn from 0..3 (all-zero rows fall back to one random message).
    """
    k = rng.randint(2, 4)
    msgs = tuple(f"m{i}" for i in range(k))
    joint = {}
    for th in lp.types:
        w = [rng.randint(0, 3) for _ in msgs]
        if not any(w):
            w[rng.randrange(k)] = 1
        total = sum(w)
        for m, wi in zip(msgs, w):
            if wi:
                joint[th, m] = lp.prior[th] * Fraction(wi, total)
    return LemonsTest(msgs, joint)


def fuzz_proposition(lp: LemonsProblem, trials: int, seed: int = 0) -> FuzzReport:
    """Random tests; every credible one must pay the seller at most ``R0``."""
    if trials < 1:
        raise ValueError("trials must be at least 1")
    bench = no_info_benchmark(lp)
    rng = random.Random(seed)
    credible = violations = 0
    best_cred = None
    best = None
    for _ in range(trials):
        t = random_test(lp, rng)
        res = check_credibility(lp, t)
        pay = res.equilibrium.seller_payoff
        best = pay if best is None else max(best, pay)
        if res.credible:
            credible += 1
            best_cred = pay if best_cred is None else max(best_cred, pay)
            if pay > bench.r0:
                violations += 1
    return FuzzReport(trials, seed, credible, violations, bench.r0, best_cred, best)


def running_example() -> LemonsProblem:
    return LemonsProblem.shifted(["1/5", "2/5", "3/5", "4/5"], ["1/4"] * 4, "1/10")
