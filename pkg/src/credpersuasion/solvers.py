"""Sender-optimal outcomes with and without full commitment.

The optimal stable outcome is found by enumerating the maximal cyclically
monotone supports (cyclical monotonicity constrains only which cells carry
mass, never how much) and solving the obedience LP restricted to each.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Iterator, Sequence

from . import transport
from .core import (
    Cell,
    OutcomeDistribution,
    PersuasionProblem,
    best_responses,
    expected_payoffs,
    no_information_value,
    require_valid,
)
from .simplex import linprog
from .stability import classify_modularity, is_stable

ZERO = Fraction(0)
MAX_GENERAL_CELLS = 20


@dataclass(frozen=True)
class CommitmentResult:
    outcome: OutcomeDistribution
    value: Fraction


def _obedience_lp(p: PersuasionProblem, cells: Sequence[Cell]) -> CommitmentResult | None:
    cells = list(cells)
    idx = {c: i for i, c in enumerate(cells)}
    n = len(cells)
    A_eq, b_eq = [], []
    for s in p.states:
        row = [0] * n
        for a in p.actions:
            if (s, a) in idx:
                row[idx[s, a]] = 1
        A_eq.append(row)
        b_eq.append(p.prior[s])
    A_ub, b_ub = [], []
    for a in p.actions:
        col = [c for c in cells if c[1] == a]
        if not col:
            continue
        for a2 in p.actions:
            if a2 == a:
                continue
            row = [0] * n
            for s, _ in col:
                row[idx[s, a]] = p.u_r[s, a2] - p.u_r[s, a]
            A_ub.append(row)
            b_ub.append(0)
    res = linprog([p.u_s[c] for c in cells], A_ub=A_ub or None, b_ub=b_ub or None, A_eq=A_eq, b_eq=b_eq)
    if not res.ok:
        return None
    prob = {c: ZERO for c in p.cells()}
    for c, v in zip(cells, res.x):
        prob[c] = v
    return CommitmentResult(OutcomeDistribution(prob), res.value)


def solve_full_commitment(p: PersuasionProblem) -> CommitmentResult:
    """Sender-optimal obedient outcome (an optimal LP vertex) and its value."""
    require_valid(p)
    result = _obedience_lp(p, p.cells())
    assert result is not None, "no-information outcomes are always feasible"
    return result


# ---------------------------------------------------------------------------
# support enumeration


@dataclass(frozen=True)
class SupportSet:
    cells: tuple[Cell, ...]
    cyclically_monotone: bool
    comonotone: bool | None


def _cell_key(p: PersuasionProblem):
    so = p.states
    ao = p.actions
    return lambda c: (so.index(c[0]), ao.index(c[1]))


def _staircases(states: Sequence[str], actions: Sequence[str]) -> Iterator[tuple[Cell, ...]]:
    """Monotone lattice paths from (lowest state, lowest action) to (highest, highest)."""
    m, n = len(states), len(actions)

    def walk(i, j, acc):
        acc = acc + [(states[i], actions[j])]
        if i == m - 1 and j == n - 1:
            yield tuple(acc)
            return
        if i < m - 1:
            yield from walk(i + 1, j, acc)
        if j < n - 1:
            yield from walk(i, j + 1, acc)

    yield from walk(0, 0, [])


def _maximal_cm_supports(p: PersuasionProblem) -> list[frozenset[Cell]]:
    """Maximal cyclically monotone subsets of states × actions.

    Branches on which cell of a violating cycle to drop; every CM set misses
    at least one cell of each violating cycle, so this reaches all maximal ones.
    """
    found: list[frozenset] = []
    seen: set[frozenset] = set()
    stack = [frozenset(p.cells())]
    key = _cell_key(p)
    while stack:
        cur = stack.pop()
        if cur in seen:
            continue
        seen.add(cur)
        if any(cur <= f for f in found):
            continue
        cells = sorted(cur, key=key)
        report = transport._cm_of_support(cells, p.states, p.actions, p.u_s)
        if report.holds:
            found = [f for f in found if not f <= cur]
            found.append(cur)
            continue
        for c in report.witness:
            stack.append(cur - {c})
    return found


def enumerate_cm_supports(p: PersuasionProblem, mode: str = "maximal-general", max_cells: int = MAX_GENERAL_CELLS) -> list[SupportSet]:
    """Maximal supports usable by a stable outcome, in deterministic order.

    Supports that leave some state uncovered are dropped: no outcome with the
    prior as its state marginal fits inside them.
    """
    require_valid(p)
    key = _cell_key(p)
    if mode == "comonotone-only":
        if p.state_order is None or p.action_order is None:
            raise ValueError("orders required")
        cls = classify_modularity(p.u_s, p.state_order, p.action_order)
        if not cls.supermodular:
            raise ValueError(f"comonotone-only mode needs supermodular u_S, got {cls.kind}")
        out = [SupportSet(tuple(sorted(path, key=key)), True, True) for path in _staircases(p.state_order, p.action_order)]
    elif mode == "maximal-general":
        if len(p.cells()) > max_cells:
            raise ValueError(f"instance too large for support enumeration ({len(p.cells())} cells > {max_cells})")
        out = []
        for cells in _maximal_cm_supports(p):
            if {s for s, _ in cells} != set(p.states):
                continue
            out.append(SupportSet(tuple(sorted(cells, key=key)), True, _comonotone_cells(p, cells)))
    else:
        raise ValueError("mode must be 'maximal-general' or 'comonotone-only'")
    out.sort(key=lambda s: [key(c) for c in s.cells])
    return out


def _comonotone_cells(p: PersuasionProblem, cells) -> bool | None:
    if p.state_order is None or p.action_order is None:
        return None
    so, ao = p.state_order, p.action_order
    for (s1, a1), (s2, a2) in combinations(cells, 2):
        d_s = so.index(s1) - so.index(s2)
        d_a = ao.index(a1) - ao.index(a2)
        if d_s * d_a < 0:
            return False
    return True


def default_support_mode(p: PersuasionProblem) -> str:
    if p.state_order is not None and p.action_order is not None:
        if classify_modularity(p.u_s, p.state_order, p.action_order).kind == "strictly supermodular":
            return "comonotone-only"
    return "maximal-general"


@dataclass(frozen=True)
class StableResult:
    outcome: OutcomeDistribution
    value: Fraction
    support: SupportSet
    mode: str
    supports_checked: int


def solve_optimal_stable(p: PersuasionProblem, mode: str = "auto", max_cells: int = MAX_GENERAL_CELLS) -> StableResult:
    """Best stable outcome: max over maximal CM supports of the restricted obedience LP.

    Ties between supports go to the first support in enumeration order.
    """
    require_valid(p)
    if mode == "auto":
        mode = default_support_mode(p)
    supports = enumerate_cm_supports(p, mode, max_cells)
    best = None
    for sup in supports:
        res = _obedience_lp(p, sup.cells)
        if res is None:
            continue
        if best is None or res.value > best[0].value:
            best = (res, sup)
    assert best is not None, "the no-information outcome fits some CM support"
    res, sup = best
    report = is_stable(p, res.outcome)
    if not report.stable:
        raise AssertionError("LP optimum on a CM support failed the stability check")
    return StableResult(res.outcome, res.value, sup, mode, len(supports))


# ---------------------------------------------------------------------------
# two-state concavification


@dataclass(frozen=True)
class EnvelopePoint:
    mu: Fraction
    v: Fraction
    envelope: Fraction
    actions: tuple[str, ...]


@dataclass(frozen=True)
class Envelope2State:
    """Indirect utility and its concave envelope over beliefs ``mu = P(high state)``."""

    low_state: str
    high_state: str
    thresholds: tuple[Fraction, ...]
    intervals: tuple[tuple[Fraction, Fraction, str], ...]
    points: tuple[EnvelopePoint, ...]
    hull: tuple[tuple[Fraction, Fraction], ...]
    prior_mu: Fraction
    value_at_prior: Fraction
    selection: str

    def envelope_at(self, mu: Fraction) -> Fraction:
        return _hull_value(self.hull, Fraction(mu))

    def to_csv(self) -> str:
        lines = ["mu,v,envelope"]
        for pt in self.points:
            lines.append(f"{pt.mu},{pt.v},{pt.envelope}")
        return "\n".join(lines) + "\n"


def _hull_value(hull, mu):
    for (x0, y0), (x1, y1) in zip(hull, hull[1:]):
        if x0 <= mu <= x1:
            if x1 == x0:
                return max(y0, y1)
            return y0 + (y1 - y0) * (mu - x0) / (x1 - x0)
    raise ValueError("belief outside [0, 1]")


def _upper_hull(points):
    pts = sorted(points)
    hull: list = []
    for pt in pts:
        while len(hull) >= 2:
            (x1, y1), (x2, y2) = hull[-2], hull[-1]
            # drop the middle point unless it lies strictly above the chord
            if (y2 - y1) * (pt[0] - x1) <= (pt[1] - y1) * (x2 - x1):
                hull.pop()
            else:
                break
        hull.append(pt)
    return hull


def concavify_two_state(p: PersuasionProblem, selection: str = "sender-best") -> Envelope2State:
    """Receiver best-response regions, Sender indirect utility and its concave envelope.

    Beliefs are the probability of the higher state (last in the declared
    state order, or in input order).  ``selection`` resolves Receiver
    indifference at thresholds: ``sender-best`` (default) or ``sender-worst``;
    the envelope is always taken over the upper closure of the indirect utility.
    """
    require_valid(p)
    if len(p.states) != 2:
        raise ValueError("requires exactly two states")
    if selection not in ("sender-best", "sender-worst"):
        raise ValueError("selection must be 'sender-best' or 'sender-worst'")
    order = p.state_order or p.states
    lo, hi = order
    one = Fraction(1)

    def ur(a, mu):
        return (one - mu) * p.u_r[lo, a] + mu * p.u_r[hi, a]

    def us(a, mu):
        return (one - mu) * p.u_s[lo, a] + mu * p.u_s[hi, a]

    def br(mu):
        return best_responses(p, {lo: one - mu, hi: mu})

    candidates = {ZERO, one}
    for a, b in combinations(p.actions, 2):
        da = p.u_r[hi, a] - p.u_r[lo, a]
        db = p.u_r[hi, b] - p.u_r[lo, b]
        if da != db:
            mu = (p.u_r[lo, b] - p.u_r[lo, a]) / (da - db)
            if 0 <= mu <= 1:
                candidates.add(mu)
    grid = sorted(candidates)
    breakpoints = [mu for mu in grid if mu in (ZERO, one) or len(br(mu)) > 1]
    thresholds = tuple(mu for mu in breakpoints if 0 < mu < 1 and len(br(mu)) > 1)
    intervals = []
    for x0, x1 in zip(breakpoints, breakpoints[1:]):
        mid = (x0 + x1) / 2
        acts = br(mid)
        a = max(acts, key=lambda x: us(x, mid)) if selection == "sender-best" else min(acts, key=lambda x: us(x, mid))
        intervals.append((x0, x1, a))
    # upper closure: at each breakpoint the best value over all tied actions
    upper = {mu: max(us(a, mu) for a in br(mu)) for mu in breakpoints}
    hull = _upper_hull(list(upper.items()))
    points = []
    for mu in breakpoints:
        acts = tuple(br(mu))
        vals = [us(a, mu) for a in acts]
        v = max(vals) if selection == "sender-best" else min(vals)
        points.append(EnvelopePoint(mu, v, _hull_value(hull, mu), acts))
    prior_mu = p.prior[hi]
    return Envelope2State(
        low_state=lo,
        high_state=hi,
        thresholds=thresholds,
        intervals=tuple(intervals),
        points=tuple(points),
        hull=tuple(hull),
        prior_mu=prior_mu,
        value_at_prior=_hull_value(hull, prior_mu),
        selection=selection,
    )


# ---------------------------------------------------------------------------
# brute-force oracle


def _compositions(total: int, parts: int) -> Iterator[tuple[int, ...]]:
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def brute_force_optimal_stable(p: PersuasionProblem, grid: int, max_cells: int = 9) -> Fraction:
    """Best Sender payoff over stable outcomes whose entries are multiples of ``1/grid``.

    Works in integer counts: payoffs are scaled to integers, obedience is
    checked per outcome, cyclical monotonicity once per distinct support.
    """
    require_valid(p)
    if grid < 1:
        raise ValueError("grid must be a positive integer")
    if len(p.cells()) > max_cells:
        raise ValueError("instance too large")
    counts = []
    for s in p.states:
        c = p.prior[s] * grid
        if c.denominator != 1:
            raise ValueError(f"prior of {s!r} is not a multiple of 1/{grid}")
        counts.append(int(c))
    scale = 1
    for v in list(p.u_s.values()) + list(p.u_r.values()):
        scale = scale * v.denominator // math.gcd(scale, v.denominator)
    S, A = p.states, p.actions
    us = [[int(p.u_s[s, a] * scale) for a in A] for s in S]
    ur = [[int(p.u_r[s, a] * scale) for a in A] for s in S]
    nA = len(A)
    rows_by_state = [list(_compositions(c, nA)) for c in counts]
    row_value = [[sum(r[j] * us[i][j] for j in range(nA)) for r in rows] for i, rows in enumerate(rows_by_state)]
    cm_cache: dict[frozenset, bool] = {}
    best_value = None
    best_rows = None

    def obedient(rows) -> bool:
        for j in range(nA):
            if not any(r[j] for r in rows):
                continue
            base = sum(r[j] * ur[i][j] for i, r in enumerate(rows))
            for k in range(nA):
                if k != j and base < sum(r[j] * ur[i][k] for i, r in enumerate(rows)):
                    return False
        return True

    def visit(i, chosen, value):
        nonlocal best_value, best_rows
        if i == len(S):
            if best_value is not None and value <= best_value:
                return
            if not obedient(chosen):
                return
            supp = frozenset((S[a], A[b]) for a, r in enumerate(chosen) for b in range(nA) if r[b])
            ok = cm_cache.get(supp)
            if ok is None:
                ok = transport._cm_of_support(sorted(supp, key=_cell_key(p)), S, A, p.u_s).holds
                cm_cache[supp] = ok
            if ok:
                best_value, best_rows = value, list(chosen)
            return
        for r, v in zip(rows_by_state[i], row_value[i]):
            visit(i + 1, chosen + [r], value + v)

    visit(0, [], 0)
    prob = {(S[i], A[j]): Fraction(r[j], grid) for i, r in enumerate(best_rows) for j in range(nA)}
    outcome = OutcomeDistribution(prob)
    if not is_stable(p, outcome).stable:
        raise AssertionError("brute-force winner failed the stability check")
    value = Fraction(best_value, grid * scale)
    assert value == expected_payoffs(p, outcome)[0]
    return value


def sandwich(p: PersuasionProblem) -> tuple[Fraction, Fraction, Fraction]:
    """(best no-information, optimal stable, full commitment) values."""
    return (
        no_information_value(p, "best"),
        solve_optimal_stable(p).value,
        solve_full_commitment(p).value,
    )
