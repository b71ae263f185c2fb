"""Seeded random instances for property suites and experiment scripts.

All draws go through a ``random.Random`` so the values are exact rationals
with small denominators and a seed reproduces the instance bit for bit.
"""

from __future__ import annotations

import random
from fractions import Fraction

from .core import OutcomeDistribution, PersuasionProblem, ReceiverStrategy, Test
from .transport import Coupling


def random_pmf(rng: random.Random, k: int, full_support: bool = True, scale: int = 6) -> list[Fraction]:
    low = 1 if full_support else 0
    while True:
        w = [rng.randint(low, scale) for _ in range(k)]
        if sum(w):
            total = sum(w)
            return [Fraction(x, total) for x in w]


def random_matrix(rng: random.Random, m: int, n: int, lo: int = -4, hi: int = 4, den: int = 2) -> list[list[Fraction]]:
    return [[Fraction(rng.randint(lo * den, hi * den), den) for _ in range(n)] for _ in range(m)]


def random_problem(
    rng: random.Random,
    n_states: int | None = None,
    n_actions: int | None = None,
    max_states: int = 4,
    max_actions: int = 4,
    separable_sender: bool = False,
) -> PersuasionProblem:
    m = n_states or rng.randint(2, max_states)
    n = n_actions or rng.randint(2, max_actions)
    states = [f"s{i}" for i in range(m)]
    actions = [f"a{j}" for j in range(n)]
    if separable_sender:
        f = [Fraction(rng.randint(-6, 6), 2) for _ in range(m)]
        g = [Fraction(rng.randint(-6, 6), 2) for _ in range(n)]
        u_s = [[f[i] + g[j] for j in range(n)] for i in range(m)]
    else:
        u_s = random_matrix(rng, m, n)
    return PersuasionProblem.from_rows(
        states, actions, random_pmf(rng, m), u_s, random_matrix(rng, m, n),
        state_order=states, action_order=actions,
    )


def random_joint(rng: random.Random, prior: list[Fraction], k: int, density: float = 0.6) -> list[list[Fraction]]:
    """Rows summing to ``prior``, each with a random sparse split over ``k`` columns."""
    rows = []
    for mass in prior:
        w = [rng.randint(1, 4) if rng.random() < density else 0 for _ in range(k)]
        if not any(w):
            w[rng.randrange(k)] = 1
        total = sum(w)
        rows.append([mass * Fraction(x, total) for x in w])
    return rows


def random_outcome(rng: random.Random, p: PersuasionProblem, density: float = 0.6) -> OutcomeDistribution:
    rows = random_joint(rng, [p.prior[s] for s in p.states], len(p.actions), density)
    return OutcomeDistribution({(s, a): rows[i][j] for i, s in enumerate(p.states) for j, a in enumerate(p.actions)})


def random_coupling(rng: random.Random, m: int, n: int, density: float = 0.5) -> tuple[Coupling, dict]:
    """Random coupling (exact marginals by construction) and a random cost matrix."""
    rows = [f"x{i}" for i in range(m)]
    cols = [f"y{j}" for j in range(n)]
    mat = random_joint(rng, random_pmf(rng, m), n, density)
    joint = {(r, c): mat[i][j] for i, r in enumerate(rows) for j, c in enumerate(cols)}
    cost_rows = random_matrix(rng, m, n, -3, 3, 1)
    cost = {(r, c): cost_rows[i][j] for i, r in enumerate(rows) for j, c in enumerate(cols)}
    return Coupling(tuple(rows), tuple(cols), joint), cost


def random_profile(rng: random.Random, p: PersuasionProblem, n_messages: int | None = None) -> tuple[Test, ReceiverStrategy]:
    k = n_messages or rng.randint(1, 3)
    msgs = tuple(f"m{i}" for i in range(k))
    rows = random_joint(rng, [p.prior[s] for s in p.states], k)
    joint = {(s, m): rows[i][j] for i, s in enumerate(p.states) for j, m in enumerate(msgs)}
    sigma = ReceiverStrategy({m: rng.choice(p.actions) for m in msgs})
    return Test(msgs, joint), sigma
