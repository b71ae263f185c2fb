"""Stability of outcome distributions and the structural results built on it.

An outcome is stable exactly when it is obedient for the Receiver and its
support is cyclically monotone for the Sender's payoff; :func:`is_stable`
combines the two checks and carries both certificates.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Mapping, Sequence

from . import transport
from .core import (
    Cell,
    OutcomeDistribution,
    PersuasionProblem,
    ReceiverStrategy,
    Test,
    best_responses,
    expected_payoffs,
    fully_revealing_outcome,
    no_information_outcomes,
    profile_payoffs,
    require_valid,
)
from .simplex import linprog

ZERO = Fraction(0)


@dataclass(frozen=True)
class ObedienceReport:
    holds: bool
    per_action: Mapping[str, tuple[tuple[str, Fraction], ...]]
    violations: tuple[tuple[str, str], ...]


@dataclass(frozen=True)
class StabilityReport:
    obedience: ObedienceReport
    cm: transport.CmReport
    stable: bool


def check_obedience(p: PersuasionProblem, o: OutcomeDistribution) -> ObedienceReport:
    per_action = {}
    violations = []
    for a in p.actions:
        if o.action_mass(a) == 0:
            continue
        slacks = []
        for a2 in p.actions:
            if a2 == a:
                continue
            slack = sum((o[s, a] * (p.u_r[s, a] - p.u_r[s, a2]) for s in p.states), ZERO)
            slacks.append((a2, slack))
            if slack < 0:
                violations.append((a, a2))
        per_action[a] = tuple(slacks)
    return ObedienceReport(not violations, per_action, tuple(violations))


def outcome_coupling(p: PersuasionProblem, o: OutcomeDistribution) -> transport.Coupling:
    return transport.Coupling(p.states, p.actions, {c: o[c] for c in p.cells()})


def is_stable(p: PersuasionProblem, o: OutcomeDistribution) -> StabilityReport:
    ob = check_obedience(p, o)
    cm = transport.check_cyclical_monotonicity(outcome_coupling(p, o), p.u_s)
    return StabilityReport(ob, cm, ob.holds and cm.holds)


# ---------------------------------------------------------------------------
# orders and modularity


def _orders(p: PersuasionProblem) -> tuple[tuple[str, ...], tuple[str, ...]]:
    if p.state_order is None or p.action_order is None:
        raise ValueError("no order declared")
    return p.state_order, p.action_order


def is_comonotone(p: PersuasionProblem, o: OutcomeDistribution) -> tuple[bool, tuple[Cell, Cell] | None]:
    """Exhaustive pairwise scan; returns the first crossed pair (lower state first)."""
    so, ao = _orders(p)
    supp = sorted(o.support(), key=lambda c: (so.index(c[0]), ao.index(c[1])))
    for c1, c2 in combinations(supp, 2):
        if so.index(c1[0]) < so.index(c2[0]) and ao.index(c1[1]) > ao.index(c2[1]):
            return False, (c1, c2)
    return True, None


SUPERMODULAR_KINDS = ("strictly supermodular", "supermodular", "additively separable")
SUBMODULAR_KINDS = ("strictly submodular", "submodular", "additively separable")


@dataclass(frozen=True)
class ModularityClass:
    kind: str
    state_order: tuple[str, ...]
    action_order: tuple[str, ...]

    @property
    def supermodular(self) -> bool:
        return self.kind in SUPERMODULAR_KINDS

    @property
    def submodular(self) -> bool:
        return self.kind in SUBMODULAR_KINDS


def classify_modularity(
    matrix: Mapping[Cell, Fraction], state_order: Sequence[str], action_order: Sequence[str]
) -> ModularityClass:
    """Exact sign pattern of every 2x2 minor ``u(t,a)+u(t',a')-u(t,a')-u(t',a)``, t>t', a>a'."""
    signs = set()
    for i, j in combinations(range(len(state_order)), 2):
        lo, hi = state_order[i], state_order[j]
        for k, l in combinations(range(len(action_order)), 2):
            alo, ahi = action_order[k], action_order[l]
            minor = matrix[hi, ahi] + matrix[lo, alo] - matrix[hi, alo] - matrix[lo, ahi]
            signs.add((minor > 0) - (minor < 0))
    if signs <= {0}:
        kind = "additively separable"
    elif signs == {1}:
        kind = "strictly supermodular"
    elif signs <= {0, 1}:
        kind = "supermodular"
    elif signs == {-1}:
        kind = "strictly submodular"
    elif signs <= {0, -1}:
        kind = "submodular"
    else:
        kind = "none"
    return ModularityClass(kind, tuple(state_order), tuple(action_order))


# ---------------------------------------------------------------------------
# profile-level checks


def _positive_messages(t: Test) -> list[str]:
    return [m for m in t.messages if t.message_mass(m) > 0]


def profile_cost(p: PersuasionProblem, t: Test, s: ReceiverStrategy) -> dict[Cell, Fraction]:
    return {(st, m): p.u_s[st, s(m)] for st in p.states for m in _positive_messages(t)}


def is_credible_profile(p: PersuasionProblem, t: Test, s: ReceiverStrategy) -> bool:
    """No test with the same message marginal pays the Sender more (decided by the transport LP)."""
    msgs = _positive_messages(t)
    cost = profile_cost(p, t, s)
    coupling = transport.Coupling(p.states, tuple(msgs), {(st, m): t[st, m] for st in p.states for m in msgs})
    _, best = transport.solve_transport(coupling.row_marginal(), coupling.col_marginal(), cost)
    return coupling.value(cost) == best


def is_ric_profile(p: PersuasionProblem, t: Test, s: ReceiverStrategy) -> bool:
    for m in _positive_messages(t):
        column = {st: t[st, m] for st in p.states}
        if s(m) not in best_responses(p, column):
            return False
    return True


def check_spne_outcome(p: PersuasionProblem, t: Test, s: ReceiverStrategy) -> bool:
    """Credible, R-IC, and at least the Sender's lowest no-information payoff."""
    if not is_credible_profile(p, t, s) or not is_ric_profile(p, t, s):
        return False
    floor = min(x.sender_payoff for x in no_information_outcomes(p))
    return profile_payoffs(p, t, s)[0] >= floor


# ---------------------------------------------------------------------------
# belief splitting


def prior_best_response(p: PersuasionProblem) -> str:
    br = best_responses(p, p.prior)
    if len(br) != 1:
        raise ValueError("prior best response not unique")
    return br[0]


def _split_target(p: PersuasionProblem, direction: str) -> tuple[str, str, str]:
    so, ao = _orders(p)
    a0 = prior_best_response(p)
    if direction == "auto":
        direction = "up" if a0 != ao[-1] else "down"
    if direction == "up":
        if a0 == ao[-1]:
            raise ValueError("prior best response is already the highest action")
        return a0, so[-1], ao[-1]
    if direction == "down":
        if a0 == ao[0]:
            raise ValueError("prior best response is already the lowest action")
        return a0, so[0], ao[0]
    raise ValueError("direction must be 'auto', 'up' or 'down'")


def belief_splitting_outcome(p: PersuasionProblem, eps: Fraction, direction: str = "auto") -> OutcomeDistribution:
    """All mass on the prior best response except ``eps`` of the extreme state sent to the extreme action.

    ``up`` moves mass of the highest state to the highest action, ``down``
    the lowest state to the lowest action; ``auto`` picks ``up`` unless the
    prior best response already is the highest action.
    """
    require_valid(p)
    a0, theta, target = _split_target(p, direction)
    eps = Fraction(eps)
    if not (0 < eps < p.prior[theta]):
        raise ValueError("eps out of range")
    prob = {c: ZERO for c in p.cells()}
    for st in p.states:
        prob[st, a0] = p.prior[st]
    prob[theta, a0] -= eps
    prob[theta, target] = eps
    return OutcomeDistribution(prob)


def max_splitting_eps(p: PersuasionProblem, direction: str = "auto") -> Fraction | None:
    """Supremum of eps keeping the prior best response obedient after the split.

    ``None`` when the extreme action is not obedient at the extreme state, in
    which case no split of this shape is obedient.
    """
    a0, theta, target = _split_target(p, direction)
    if target not in best_responses(p, {theta: Fraction(1)}):
        return None
    bound = p.prior[theta]
    for a2 in p.actions:
        if a2 == a0:
            continue
        gap_prior = sum((p.prior[st] * (p.u_r[st, a0] - p.u_r[st, a2]) for st in p.states), ZERO)
        gap_theta = p.u_r[theta, a0] - p.u_r[theta, a2]
        if gap_theta > 0:
            bound = min(bound, gap_prior / gap_theta)
    return bound


# ---------------------------------------------------------------------------
# structural predictions


def _action_rationalizable(p: PersuasionProblem, a: str) -> bool:
    """Some belief makes ``a`` a best response (LP feasibility)."""
    n = len(p.states)
    A_ub, b_ub = [], []
    for a2 in p.actions:
        if a2 != a:
            A_ub.append([p.u_r[s, a2] - p.u_r[s, a] for s in p.states])
            b_ub.append(0)
    res = linprog([0] * n, A_ub=A_ub or None, b_ub=b_ub or None, A_eq=[[1] * n], b_eq=[1])
    return res.ok


@dataclass(frozen=True)
class Predictions:
    sender_class: ModularityClass | None
    receiver_class: ModularityClass | None
    premises: Mapping[str, bool]
    conclusions: tuple[str, ...]
    warnings: tuple[str, ...] = field(default=())
    no_info_best: Fraction = ZERO
    fully_revealing_value: Fraction = ZERO


def structural_report(p: PersuasionProblem, commitment_value: Fraction | None = None) -> Predictions:
    """Which structural results apply to ``p`` and what they predict.

    ``commitment_value`` is needed for the "benefits from persuasion" premise
    of the dominant-action condition; without it that premise is omitted.
    """
    require_valid(p)
    warnings = []
    for a in p.actions:
        if not _action_rationalizable(p, a):
            warnings.append(f"action {a!r} is never a best response")
    for a, b in combinations(p.actions, 2):
        if all(p.u_r[s, a] == p.u_r[s, b] for s in p.states):
            warnings.append(f"actions {a!r} and {b!r} are duplicates for the Receiver")

    no_info = no_information_outcomes(p)
    best0 = max(x.sender_payoff for x in no_info)
    fr_value = expected_payoffs(p, fully_revealing_outcome(p, "sender-best"))[0]
    generic = len(no_info) == 1

    premises: dict[str, bool] = {"additively_separable": False}
    conclusions: list[str] = []
    sc = rc = None
    if p.state_order is None or p.action_order is None:
        warnings.append("no order declared: modularity-based results not evaluated")
        order_free = classify_modularity(p.u_s, p.states, p.actions)
        premises["additively_separable"] = order_free.kind == "additively separable"
    else:
        so, ao = p.state_order, p.action_order
        sc = classify_modularity(p.u_s, so, ao)
        rc = classify_modularity(p.u_r, so, ao)
        premises["additively_separable"] = sc.kind == "additively separable"
        premises["no_information"] = sc.kind == "strictly supermodular" and rc.submodular
        both_super = sc.supermodular and rc.supermodular
        premises["both_supermodular"] = both_super
        top, bottom = ao[-1], ao[0]
        hi, lo = so[-1], so[0]
        premises["generic_prior"] = generic
        dominant = all(p.u_s[s, top] > p.u_s[s, a] for s in p.states for a in p.actions if a != top)
        premises["highest_action_dominant"] = dominant
        extreme = all(p.u_s[hi, top] > p.u_s[hi, a] for a in p.actions if a != top) and all(
            p.u_s[lo, bottom] > p.u_s[lo, a] for a in p.actions if a != bottom
        )
        premises["extreme_actions_in_extreme_states"] = extreme
        premises["fully_revealing_beats_no_information"] = fr_value > best0
        premises["binary_action"] = len(p.actions) == 2
        if premises["no_information"]:
            conclusions.append("every stable outcome is a no-information outcome")
        if both_super:
            benefits = None if commitment_value is None else commitment_value > best0
            if benefits is not None:
                premises["benefits_from_persuasion"] = benefits
            if dominant and generic and benefits:
                conclusions.append("sender benefits from credible persuasion (dominant highest action)")
            if extreme and generic:
                conclusions.append("sender benefits from credible persuasion (extreme actions)")
            if fr_value > best0:
                conclusions.append("sender benefits from credible persuasion (fully revealing)")
            if len(p.actions) == 2:
                conclusions.append("an optimal full-commitment outcome is stable")
    if premises["additively_separable"]:
        conclusions.append("every obedient outcome is stable")
    return Predictions(sc, rc, premises, tuple(conclusions), tuple(warnings), best0, fr_value)
