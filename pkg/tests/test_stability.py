import random
from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from credpersuasion import stability as stb
from credpersuasion.core import (
    PersuasionProblem,
    ReceiverStrategy,
    best_responses,
    canonical_profile,
    expected_payoffs,
    make_outcome,
    make_test,
    no_information_outcomes,
    outcome_from_profile,
)
from credpersuasion.generate import random_outcome, random_problem, random_profile


def commitment_outcome(p, hi_action, lo_action):
    return make_outcome(p, {("H", hi_action): "3/10", ("L", hi_action): "3/10", ("L", lo_action): "2/5"})


def test_obedience_slacks(usedcar):
    rep = stb.check_obedience(usedcar, commitment_outcome(usedcar, "Buy", "NotBuy"))
    assert rep.holds
    assert dict(rep.per_action["Buy"]) == {"NotBuy": 0}
    assert dict(rep.per_action["NotBuy"]) == {"Buy": F(2, 5)}


def test_obedience_violation(usedcar):
    o = make_outcome(usedcar, {("H", "Buy"): "1/5", ("L", "Buy"): "2/5", ("H", "NotBuy"): "1/10", ("L", "NotBuy"): "3/10"})
    rep = stb.check_obedience(usedcar, o)
    assert not rep.holds and ("Buy", "NotBuy") in rep.violations
    assert dict(rep.per_action["Buy"])["NotBuy"] == F(1, 5) - F(2, 5)


def test_usedcar_commitment_unstable(usedcar):
    rep = stb.is_stable(usedcar, commitment_outcome(usedcar, "Buy", "NotBuy"))
    assert rep.obedience.holds and not rep.cm.holds and not rep.stable
    assert set(rep.cm.witness) == {("H", "Buy"), ("L", "NotBuy")}
    assert rep.cm.violation == 1


def test_school_commitment_stable(schoolp):
    rep = stb.is_stable(schoolp, commitment_outcome(schoolp, "Hire", "NotHire"))
    assert rep.stable and rep.cm.potentials is not None


def test_no_information_outcomes_stable(usedcar, schoolp, ex1):
    for p in (usedcar, schoolp, ex1):
        for x in no_information_outcomes(p):
            assert stb.is_stable(p, x.outcome).stable


def test_comonotone_examples(usedcar, ex1):
    p = PersuasionProblem.from_rows(
        ["L", "H"], ["NotBuy", "Buy"], ["7/10", "3/10"], [[0, 2], [1, 2]], [[0, -1], [0, 1]],
        state_order=["L", "H"], action_order=["NotBuy", "Buy"],
    )
    assert stb.is_comonotone(p, make_outcome(p, {("L", "NotBuy"): "7/10", ("H", "Buy"): "3/10"})) == (True, None)
    ok, pair = stb.is_comonotone(p, make_outcome(p, {("L", "Buy"): "7/10", ("H", "NotBuy"): "3/10"}))
    assert not ok and pair == (("L", "Buy"), ("H", "NotBuy"))
    o = make_outcome(ex1, {("L", "a2"): "2/5", ("H", "a2"): "1/5", ("H", "a4"): "2/5"})
    assert stb.is_comonotone(ex1, o) == (True, None)
    bare = PersuasionProblem.from_rows(["L", "H"], ["a"], ["1/2", "1/2"], [[0], [0]], [[0], [0]])
    with pytest.raises(ValueError, match="no order declared"):
        stb.is_comonotone(bare, make_outcome(bare, {("L", "a"): "1/2", ("H", "a"): "1/2"}))


def test_modularity_classes(schoolp, usedcar):
    assert stb.classify_modularity(schoolp.u_s, ["L", "H"], ["NotHire", "Hire"]).kind == "strictly supermodular"
    assert stb.classify_modularity(usedcar.u_s, ["L", "H"], ["NotBuy", "Buy"]).kind == "strictly submodular"
    sep = {(s, a): F(i * 3 + j * 5) for i, s in enumerate("LMH") for j, a in enumerate("xyz")}
    assert stb.classify_modularity(sep, "LMH", "xyz").kind == "additively separable"
    weak = {("L", "x"): F(0), ("L", "y"): F(0), ("H", "x"): F(0), ("H", "y"): F(0), ("M", "x"): F(0), ("M", "y"): F(1)}
    assert stb.classify_modularity(weak, "LMH", "xy").kind == "none"
    weak2 = {("L", "x"): F(0), ("L", "y"): F(0), ("M", "x"): F(0), ("M", "y"): F(0), ("H", "x"): F(0), ("H", "y"): F(1)}
    assert stb.classify_modularity(weak2, "LMH", "xy").kind == "supermodular"


def test_structural_report_examples(usedcar, schoolp, ex1):
    r = stb.structural_report(usedcar)
    assert r.premises["no_information"]
    assert "every stable outcome is a no-information outcome" in r.conclusions
    r = stb.structural_report(schoolp, F(9, 10))
    assert r.premises["both_supermodular"] and r.premises["binary_action"]
    assert "an optimal full-commitment outcome is stable" in r.conclusions
    r = stb.structural_report(ex1, F(67, 80))
    assert r.premises["both_supermodular"]
    assert not r.premises["highest_action_dominant"]
    assert not r.premises["extreme_actions_in_extreme_states"]
    assert not r.premises["fully_revealing_beats_no_information"]
    assert not any("benefits" in c for c in r.conclusions)


def test_structural_report_warnings():
    p = PersuasionProblem.from_rows(["L", "H"], ["a", "b", "c"], ["1/2", "1/2"], [[0, 0, 0]] * 2, [[1, 1, -5], [0, 0, -5]])
    w = stb.structural_report(p).warnings
    assert any("never a best response" in x for x in w)
    assert any("duplicates" in x for x in w)


def test_belief_splitting(schoolp):
    o = stb.belief_splitting_outcome(schoolp, F(1, 10))
    assert (o["L", "NotHire"], o["H", "NotHire"], o["H", "Hire"], o["L", "Hire"]) == (F(7, 10), F(1, 5), F(1, 10), 0)
    assert stb.is_stable(schoolp, o).stable
    assert expected_payoffs(schoolp, o)[0] > 0
    for bad in (0, F(3, 10)):
        with pytest.raises(ValueError, match="eps out of range"):
            stb.belief_splitting_outcome(schoolp, bad)


def test_belief_splitting_needs_unique_prior_best_response():
    p = PersuasionProblem.from_rows(
        ["L", "H"], ["a", "b"], ["1/2", "1/2"], [[0, 1], [0, 1]], [[1, 0], [0, 1]],
        state_order=["L", "H"], action_order=["a", "b"],
    )
    with pytest.raises(ValueError, match="prior best response not unique"):
        stb.belief_splitting_outcome(p, F(1, 10))


def test_splitting_down_direction():
    p = PersuasionProblem.from_rows(
        ["L", "H"], ["a", "b"], ["1/2", "1/2"], [[1, 0], [1, 2]], [[1, 0], [0, 3]],
        state_order=["L", "H"], action_order=["a", "b"],
    )
    o = stb.belief_splitting_outcome(p, F(1, 10))
    assert o["L", "a"] == F(1, 10) and o["L", "b"] == F(2, 5)
    assert stb.is_stable(p, o).stable


def test_max_splitting_eps_is_tight(schoolp):
    bound = stb.max_splitting_eps(schoolp)
    assert bound == F(3, 10)
    assert stb.check_obedience(schoolp, stb.belief_splitting_outcome(schoolp, bound - F(1, 1000))).holds


def test_spne_outcome_check(usedcar, schoolp):
    t, s = canonical_profile(schoolp, commitment_outcome(schoolp, "Hire", "NotHire"))
    assert stb.check_spne_outcome(schoolp, t, s)
    t, s = canonical_profile(usedcar, commitment_outcome(usedcar, "Buy", "NotBuy"))
    assert not stb.is_credible_profile(usedcar, t, s)
    assert not stb.check_spne_outcome(usedcar, t, s)
    p = PersuasionProblem.from_rows(["L", "H"], ["a", "b"], ["1/2", "1/2"], [[3, 1], [3, 1]], [[1, 0], [0, 1]])
    t = make_test(p, ["m"], {("L", "m"): "1/2", ("H", "m"): "1/2"})
    assert stb.check_spne_outcome(p, t, ReceiverStrategy({"m": "b"}))


def test_pooled_messages_break_profile_level_equivalence(usedcar):
    # H alone in m1, L alone in m2, both mapped to NotBuy: the pooled outcome is
    # the no-information outcome (stable), but NotBuy is not a best response to m1.
    t = make_test(usedcar, ["m1", "m2"], {("H", "m1"): "3/10", ("L", "m2"): "7/10"})
    s = ReceiverStrategy({"m1": "NotBuy", "m2": "NotBuy"})
    assert stb.is_credible_profile(usedcar, t, s)
    assert not stb.is_ric_profile(usedcar, t, s)
    assert stb.is_stable(usedcar, outcome_from_profile(usedcar, t, s)).stable


def _injective_on_support(t, s):
    used = [s(m) for m in t.messages if t.message_mass(m) > 0]
    return len(used) == len(set(used))


def _responsive_profile(rng, p):
    t, s = random_profile(rng, p)
    if rng.random() < 0.5:
        choice = {}
        for m in t.messages:
            if t.message_mass(m) > 0:
                choice[m] = rng.choice(best_responses(p, t.posterior(m)))
            else:
                choice[m] = s(m)
        s = ReceiverStrategy(choice)
    return t, s


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 10**9))
def test_profile_checks_match_stability(seed):
    rng = random.Random(seed)
    p = random_problem(rng, max_states=3, max_actions=3)
    t, s = _responsive_profile(rng, p)
    direct = stb.is_credible_profile(p, t, s) and stb.is_ric_profile(p, t, s)
    o = outcome_from_profile(p, t, s)
    stable = stb.is_stable(p, o).stable
    if direct:
        assert stable
    if _injective_on_support(t, s):
        assert direct == stable
    tc, sc = canonical_profile(p, o)
    assert (stb.is_credible_profile(p, tc, sc) and stb.is_ric_profile(p, tc, sc)) == stable


@settings(max_examples=120, deadline=None)
@given(st.integers(0, 10**9))
def test_comonotone_outcomes_cm_under_supermodular_sender(seed):
    rng = random.Random(seed)
    p = random_problem(rng)
    cls = stb.classify_modularity(p.u_s, p.state_order, p.action_order)
    o = random_outcome(rng, p)
    rep = stb.is_stable(p, o)
    if cls.supermodular and stb.is_comonotone(p, o)[0]:
        assert rep.cm.holds
    if cls.kind == "strictly supermodular" and rep.cm.holds:
        assert stb.is_comonotone(p, o)[0]


def _supermodular_problem(rng, m, n, strict=True, receiver_sub=False):
    """Payoffs ``f(i) g(j)`` plus a separable part, with ``f``, ``g`` strictly increasing."""
    f = sorted(rng.sample(range(1, 20), m))
    g = sorted(rng.sample(range(1, 20), n))
    h = [rng.randint(-5, 5) for _ in range(m)]
    k = [rng.randint(-5, 5) for _ in range(n)]
    u_s = [[F(f[i] * g[j] + h[i] + k[j], 4) for j in range(n)] for i in range(m)]
    sign = -1 if receiver_sub else 1
    f2 = sorted(rng.sample(range(1, 20), m))
    g2 = sorted(rng.sample(range(1, 20), n))
    h2 = [rng.randint(-20, 20) for _ in range(m)]
    k2 = [rng.randint(-20, 20) for _ in range(n)]
    u_r = [[F(sign * f2[i] * g2[j] + h2[i] + k2[j], 4) for j in range(n)] for i in range(m)]
    states = [f"s{i}" for i in range(m)]
    actions = [f"a{j}" for j in range(n)]
    from credpersuasion.generate import random_pmf

    return PersuasionProblem.from_rows(states, actions, random_pmf(rng, m), u_s, u_r, states, actions)


@settings(max_examples=120, deadline=None)
@given(st.integers(0, 10**9))
def test_cm_equals_comonotone_when_strictly_supermodular(seed):
    rng = random.Random(seed)
    p = _supermodular_problem(rng, rng.randint(2, 4), rng.randint(2, 4))
    assert stb.classify_modularity(p.u_s, p.state_order, p.action_order).kind == "strictly supermodular"
    o = random_outcome(rng, p, density=0.5)
    assert stb.is_stable(p, o).cm.holds == stb.is_comonotone(p, o)[0]


@settings(max_examples=120, deadline=None)
@given(st.integers(0, 10**9))
def test_no_information_prediction(seed):
    from credpersuasion.solvers import solve_optimal_stable

    rng = random.Random(seed)
    p = _supermodular_problem(rng, rng.randint(2, 3), rng.randint(2, 3), receiver_sub=True)
    assert stb.structural_report(p).premises["no_information"]
    prior_best = set(best_responses(p, p.prior))
    for _ in range(5):
        o = random_outcome(rng, p)
        if stb.is_stable(p, o).stable:
            used = {a for a in p.actions if o.action_mass(a) > 0}
            assert len(used) == 1 and used <= prior_best
    res = solve_optimal_stable(p)
    used = {a for a in p.actions if res.outcome.action_mass(a) > 0}
    assert len(used) == 1 and used <= prior_best
