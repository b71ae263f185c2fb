from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from credpersuasion.core import (
    PersuasionProblem,
    ReceiverStrategy,
    canonical_profile,
    expected_payoffs,
    fully_revealing_outcome,
    make_outcome,
    make_test,
    mix,
    no_information_outcomes,
    no_information_value,
    outcome_from_profile,
    to_scalar,
    validate_problem,
)
from credpersuasion.generate import random_outcome, random_problem
import random


def test_to_scalar_is_exact():
    assert to_scalar("0.7") == F(7, 10)
    assert to_scalar("14/20") == F(7, 10)
    assert to_scalar(3) == F(3)
    with pytest.raises(TypeError):
        to_scalar(0.7)
    with pytest.raises(ValueError):
        to_scalar("seven")


def test_usedcar_is_valid(usedcar):
    assert validate_problem(usedcar).ok


@pytest.mark.parametrize(
    "prior, message",
    [((1, 0), "prior not full support"), (("1/2", "1/3"), "prior sums to 5/6")],
)
def test_invalid_priors(prior, message):
    p = PersuasionProblem.from_rows(["L", "H"], ["a"], prior, [[0], [0]], [[0], [0]])
    assert message in validate_problem(p).errors


def test_duplicate_labels_reported():
    p = PersuasionProblem.from_rows(["L", "L"], ["a"], ["1/2", "1/2"], [[0], [0]], [[0], [0]])
    assert "duplicate state labels" in validate_problem(p).errors


def test_pass_fail_profile(usedcar):
    t = make_test(usedcar, ["pass", "fail"], {("H", "pass"): "3/10", ("L", "pass"): "3/10", ("L", "fail"): "2/5"})
    s = ReceiverStrategy({"pass": "Buy", "fail": "NotBuy"})
    o = outcome_from_profile(usedcar, t, s)
    assert (o["H", "Buy"], o["L", "Buy"], o["L", "NotBuy"], o["H", "NotBuy"]) == (F(3, 10), F(3, 10), F(2, 5), 0)
    assert expected_payoffs(usedcar, o) == (F(6, 5), 0)


def test_single_message_and_merging(usedcar):
    t = make_test(usedcar, ["m0"], {("H", "m0"): "3/10", ("L", "m0"): "7/10"})
    o = outcome_from_profile(usedcar, t, ReceiverStrategy({"m0": "NotBuy"}))
    assert o["L", "NotBuy"] == F(7, 10) and o["H", "NotBuy"] == F(3, 10)
    t2 = make_test(usedcar, ["x", "y"], {("H", "x"): "1/10", ("H", "y"): "1/5", ("L", "x"): "7/10"})
    o2 = outcome_from_profile(usedcar, t2, ReceiverStrategy({"x": "NotBuy", "y": "NotBuy"}))
    assert o2 == o


def test_incomplete_strategy_rejected(usedcar):
    t = make_test(usedcar, ["x", "y"], {("H", "x"): "3/10", ("L", "y"): "7/10"})
    with pytest.raises(ValueError, match="incomplete strategy"):
        outcome_from_profile(usedcar, t, ReceiverStrategy({"x": "Buy"}))


def test_school_payoff(schoolp):
    o = make_outcome(schoolp, {("H", "Hire"): "3/10", ("L", "Hire"): "3/10", ("L", "NotHire"): "2/5"})
    assert expected_payoffs(schoolp, o)[0] == F(9, 10)


def test_single_state_payoff():
    p = PersuasionProblem.from_rows(["s"], ["a", "b"], [1], [[3, 5]], [[1, 0]])
    assert no_information_value(p) == 3


def test_marginal_enforced(usedcar):
    with pytest.raises(ValueError, match="state marginal"):
        make_outcome(usedcar, {("H", "Buy"): "1/2", ("L", "Buy"): "1/2"})


def test_no_information(usedcar, ex1):
    (only,) = no_information_outcomes(usedcar)
    assert only.action == "NotBuy" and only.sender_payoff == F(3, 10)
    (only,) = no_information_outcomes(ex1)
    assert only.action == "a3" and only.sender_payoff == F(4, 5)


def test_no_information_ties_tagged():
    p = PersuasionProblem.from_rows(["L", "H"], ["a", "b"], ["1/2", "1/2"], [[1, 0], [1, 0]], [[1, 0], [0, 1]])
    outs = no_information_outcomes(p)
    assert [o.action for o in outs] == ["a", "b"]
    assert outs[0].tags == ("sender-best",) and outs[1].tags == ("sender-worst",)


def test_fully_revealing(usedcar, ex1):
    o = fully_revealing_outcome(usedcar)
    assert o.support() == [("L", "NotBuy"), ("H", "Buy")]
    assert expected_payoffs(usedcar, o)[0] == F(3, 5)
    o = fully_revealing_outcome(ex1)
    assert set(o.support()) == {("L", "a1"), ("H", "a4")}
    assert expected_payoffs(ex1, o)[0] == 0


def test_fully_revealing_tiebreaks():
    p = PersuasionProblem.from_rows(["L", "H"], ["a", "b"], ["1/2", "1/2"], [[0, 1], [2, 0]], [[0, 0], [0, 0]])
    assert fully_revealing_outcome(p, "lowest-action").support() == [("L", "a"), ("H", "a")]
    assert fully_revealing_outcome(p, "highest-action").support() == [("L", "b"), ("H", "b")]
    assert fully_revealing_outcome(p, "sender-best").support() == [("L", "b"), ("H", "a")]


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6), st.fractions(0, 1, max_denominator=12))
def test_canonical_round_trip_and_linearity(seed, alpha):
    rng = random.Random(seed)
    p = random_problem(rng)
    o1, o2 = random_outcome(rng, p), random_outcome(rng, p)
    t, s = canonical_profile(p, o1)
    assert outcome_from_profile(p, t, s).prob == {c: o1[c] for c in p.cells()}
    mixed = mix(o1, o2, alpha)
    lhs = expected_payoffs(p, mixed)
    rhs = tuple(alpha * x + (1 - alpha) * y for x, y in zip(expected_payoffs(p, o1), expected_payoffs(p, o2)))
    assert lhs == rhs
    assert mixed.state_marginal() == dict(p.prior)
