"""Built-in worked instances: used car, school and the four-action example."""

from __future__ import annotations

from fractions import Fraction

from .core import PersuasionProblem


def used_car() -> PersuasionProblem:
    """Seller (Sender) and buyer (Receiver).  Orders make u_S strictly supermodular."""
    return PersuasionProblem.from_rows(
        states=["L", "H"],
        actions=["Buy", "NotBuy"],
        prior=["7/10", "3/10"],
        u_s=[[2, 0], [2, 1]],
        u_r=[[-1, 0], [1, 0]],
        state_order=["L", "H"],
        action_order=["Buy", "NotBuy"],
    )


def school() -> PersuasionProblem:
    """School (Sender) and employer (Receiver); both payoffs supermodular."""
    return PersuasionProblem.from_rows(
        states=["L", "H"],
        actions=["NotHire", "Hire"],
        prior=["7/10", "3/10"],
        u_s=[[0, 1], [0, 2]],
        u_r=[[0, -1], [0, 1]],
        state_order=["L", "H"],
        action_order=["NotHire", "Hire"],
    )


def example1(prior_high: Fraction | str = "3/5") -> PersuasionProblem:
    """Two states, four actions; both payoffs strictly supermodular."""
    ph = Fraction(prior_high)
    return PersuasionProblem.from_rows(
        states=["L", "H"],
        actions=["a1", "a2", "a3", "a4"],
        prior=[1 - ph, ph],
        u_s=[[0, "3/4", "1/2", -1], [-1, "3/4", 1, 0]],
        u_r=[[1, "4/5", "3/5", 0], [0, "3/5", "4/5", 1]],
        state_order=["L", "H"],
        action_order=["a1", "a2", "a3", "a4"],
    )


BUILTINS = {"usedcar": used_car, "school": school, "example1": example1}
