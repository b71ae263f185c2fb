"""Slow, obviously-correct reference computations used only by the tests."""

from __future__ import annotations

import itertools
from fractions import Fraction

from credpersuasion.simplex import linprog


def cm_by_enumeration(support, cost):
    """Cyclical monotonicity by trying every cycle of distinct support cells.

    Returns ``(holds, best_gain)`` where ``best_gain`` is the largest
    ``sum cost(x_i, y_{i+1}) - sum cost(x_i, y_i)`` over all cycles.
    """
    support = list(support)
    best = Fraction(0)
    for k in range(2, len(support) + 1):
        for combo in itertools.combinations(support, k):
            first, rest = combo[0], combo[1:]
            for perm in itertools.permutations(rest):
                cyc = (first,) + perm
                gain = sum(cost[cyc[i][0], cyc[(i + 1) % k][1]] - cost[cyc[i]] for i in range(k))
                best = max(best, gain)
    return best == 0, best


def transport_value_lp(mu, nu, cost):
    """Optimal transport value from the generic LP solver (not the transportation simplex)."""
    rows, cols = list(mu), list(nu)
    n = len(rows) * len(cols)
    var = [(r, c) for r in rows for c in cols]
    A_eq, b_eq = [], []
    for r in rows:
        A_eq.append([1 if v[0] == r else 0 for v in var])
        b_eq.append(mu[r])
    for c in cols:
        A_eq.append([1 if v[1] == c else 0 for v in var])
        b_eq.append(nu[c])
    res = linprog([cost[v] for v in var], A_eq=A_eq, b_eq=b_eq)
    assert res.ok and len(res.x) == n
    return res.value


def potentials_ok(support, cols, cost, psi):
    return all(cost[x, y] - psi[y] >= cost[x, y2] - psi[y2] for x, y in support for y2 in cols)


def nearest_quota_by_enumeration(target, n):
    """Smallest sup distance over all count vectors summing to ``n``."""
    labels = list(target)
    best = None
    for counts in _compositions(n, len(labels)):
        d = max(abs(Fraction(c, n) - target[k]) for c, k in zip(counts, labels))
        if best is None or d < best:
            best = d
    return best


def _compositions(total, parts):
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def fixed_points_by_scan(types, mu, v):
    """All fixed points of ``x -> E_mu[v | theta <= x]`` among conditional means."""
    supp = [t for t in types if mu.get(t, 0) > 0]
    cands = set()
    for k in range(1, len(supp) + 1):
        head = supp[:k]
        mass = sum(mu[t] for t in head)
        cands.add(sum(mu[t] * v[t] for t in head) / mass)
    out = []
    for x in sorted(cands):
        below = [t for t in supp if t <= x]
        val = v[supp[0]] if not below else sum(mu[t] * v[t] for t in below) / sum(mu[t] for t in below)
        if val == x:
            out.append(x)
    return out


def commitment_value_by_grid(p, grid):
    """Best obedient outcome on a grid (lower bound on the LP optimum)."""
    states, actions = p.states, p.actions
    counts = [int(p.prior[s] * grid) for s in states]
    best = None
    rows = [list(_compositions(c, len(actions))) for c in counts]
    for choice in itertools.product(*rows):
        ok = True
        for j, a in enumerate(actions):
            for a2 in actions:
                if sum(choice[i][j] * (p.u_r[s, a] - p.u_r[s, a2]) for i, s in enumerate(states)) < 0:
                    ok = False
        if ok:
            val = sum(Fraction(choice[i][j], grid) * p.u_s[s, a] for i, s in enumerate(states) for j, a in enumerate(actions))
            best = val if best is None else max(best, val)
    return best
