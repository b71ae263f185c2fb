"""Domain types for finite persuasion problems and basic payoff accounting.

Every probability and payoff is a :class:`fractions.Fraction`; nothing in
this package rounds.  Labels are plain strings and all mappings are keyed by
label (states × actions for outcomes, states × messages for tests).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

Scalar = Fraction
Cell = tuple[str, str]

TIEBREAKS = ("lowest-action", "highest-action", "sender-best")


def to_scalar(value) -> Fraction:
    """Parse an int, Fraction, or string (``"3"``, ``"0.7"``, ``"7/10"``) exactly.

    Floats are rejected: a binary float has already lost the decimal the user
    typed.
    """
    if isinstance(value, bool):
        raise TypeError("booleans are not numbers here")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        raise TypeError(f"float {value!r} is not exact; pass a string or Fraction")
    if isinstance(value, str):
        text = value.strip()
        try:
            return Fraction(text)
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"not a number: {value!r}") from exc
    raise TypeError(f"cannot interpret {type(value).__name__} as a rational")


def fmt(x: Fraction) -> str:
    """Reduced ``p/q`` (or ``p`` for integers)."""
    return str(x)


def approx(x: Fraction, digits: int = 12) -> str:
    return f"{float(x):.{digits}g}"


@dataclass(frozen=True)
class PersuasionProblem:
    """Finite Sender-Receiver problem.

    ``state_order``/``action_order`` list labels from low to high when a total
    order has been declared; they are ``None`` otherwise.
    """

    states: tuple[str, ...]
    actions: tuple[str, ...]
    prior: Mapping[str, Fraction]
    u_s: Mapping[Cell, Fraction]
    u_r: Mapping[Cell, Fraction]
    state_order: tuple[str, ...] | None = None
    action_order: tuple[str, ...] | None = None

    @classmethod
    def from_rows(
        cls,
        states: Sequence[str],
        actions: Sequence[str],
        prior: Sequence | Mapping,
        u_s: Sequence[Sequence] | Mapping,
        u_r: Sequence[Sequence] | Mapping,
        state_order: Sequence[str] | None = None,
        action_order: Sequence[str] | None = None,
    ) -> PersuasionProblem:
        """Build from row-per-state tables (rows aligned with ``actions``)."""
        states = tuple(states)
        actions = tuple(actions)
        if isinstance(prior, Mapping):
            pr = {s: to_scalar(prior[s]) for s in states}
        else:
            if len(prior) != len(states):
                raise ValueError("prior length does not match states")
            pr = {s: to_scalar(v) for s, v in zip(states, prior)}
        return cls(
            states=states,
            actions=actions,
            prior=pr,
            u_s=_table(states, actions, u_s, "u_S"),
            u_r=_table(states, actions, u_r, "u_R"),
            state_order=tuple(state_order) if state_order is not None else None,
            action_order=tuple(action_order) if action_order is not None else None,
        )

    def row(self, payoff: str, state: str) -> list[Fraction]:
        table = self.u_s if payoff == "S" else self.u_r
        return [table[state, a] for a in self.actions]

    def with_prior(self, prior: Mapping[str, Fraction]) -> PersuasionProblem:
        return PersuasionProblem(
            self.states, self.actions, dict(prior), self.u_s, self.u_r,
            self.state_order, self.action_order,
        )

    def cells(self) -> list[Cell]:
        return [(s, a) for s in self.states for a in self.actions]


def _table(states, actions, rows, name) -> dict[Cell, Fraction]:
    out: dict[Cell, Fraction] = {}
    if isinstance(rows, Mapping):
        first = next(iter(rows.keys()), None)
        if isinstance(first, tuple):
            for s in states:
                for a in actions:
                    out[s, a] = to_scalar(rows[s, a])
            return out
        seq = [rows[s] for s in states]
    else:
        seq = list(rows)
    if len(seq) != len(states):
        raise ValueError(f"{name} needs one row per state")
    for s, row in zip(states, seq):
        if isinstance(row, Mapping):
            row = [row[a] for a in actions]
        if len(row) != len(actions):
            raise ValueError(f"{name} row for {s!r} needs one entry per action")
        for a, v in zip(actions, row):
            out[s, a] = to_scalar(v)
    return out


@dataclass(frozen=True)
class ValidationReport:
    errors: tuple[str, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.errors


def validate_problem(p: PersuasionProblem) -> ValidationReport:
    errors: list[str] = []
    if not p.states:
        errors.append("no states")
    if not p.actions:
        errors.append("no actions")
    if len(set(p.states)) != len(p.states):
        errors.append("duplicate state labels")
    if len(set(p.actions)) != len(p.actions):
        errors.append("duplicate action labels")
    if set(p.prior) != set(p.states):
        errors.append("prior keys do not match states")
    else:
        if any(p.prior[s] <= 0 for s in p.states):
            errors.append("prior not full support")
        total = sum(p.prior.values(), Fraction(0))
        if total != 1:
            errors.append(f"prior sums to {total}")
    for name, table in (("u_S", p.u_s), ("u_R", p.u_r)):
        missing = [c for c in p.cells() if c not in table]
        if missing:
            errors.append(f"{name} missing entries for {missing}")
    for name, order, labels in (
        ("order_states", p.state_order, p.states),
        ("order_actions", p.action_order, p.actions),
    ):
        if order is not None and sorted(order) != sorted(labels):
            errors.append(f"{name} is not a permutation of the labels")
    return ValidationReport(tuple(errors))


def require_valid(p: PersuasionProblem) -> None:
    report = validate_problem(p)
    if not report.ok:
        raise ValueError("invalid problem: " + "; ".join(report.errors))


@dataclass(frozen=True)
class OutcomeDistribution:
    """Joint pmf over states × actions; missing cells are zero."""

    prob: Mapping[Cell, Fraction]

    def __getitem__(self, cell: Cell) -> Fraction:
        return self.prob.get(cell, Fraction(0))

    def support(self) -> list[Cell]:
        return [c for c, v in self.prob.items() if v > 0]

    def action_mass(self, action: str) -> Fraction:
        return sum((v for (s, a), v in self.prob.items() if a == action), Fraction(0))

    def state_marginal(self) -> dict[str, Fraction]:
        out: dict[str, Fraction] = {}
        for (s, _), v in self.prob.items():
            out[s] = out.get(s, Fraction(0)) + v
        return out


def make_outcome(p: PersuasionProblem, prob: Mapping[Cell, object]) -> OutcomeDistribution:
    """Validate ``prob`` against ``p`` exactly and return a dense outcome."""
    dense: dict[Cell, Fraction] = {}
    for cell in prob:
        if cell not in p.u_s:
            raise ValueError(f"unknown cell {cell!r}")
    for cell in p.cells():
        v = to_scalar(prob.get(cell, 0))
        if v < 0:
            raise ValueError(f"negative probability at {cell}")
        dense[cell] = v
    for s in p.states:
        row = sum((dense[s, a] for a in p.actions), Fraction(0))
        if row != p.prior[s]:
            raise ValueError(f"state marginal at {s!r} is {row}, prior is {p.prior[s]}")
    return OutcomeDistribution(dense)


@dataclass(frozen=True)
class Test:
    """Joint pmf over states × messages (``lambda`` in the usual notation)."""

    __test__ = False  # keep pytest from collecting it

    messages: tuple[str, ...]
    joint: Mapping[Cell, Fraction]

    def __getitem__(self, cell: Cell) -> Fraction:
        return self.joint.get(cell, Fraction(0))

    def message_mass(self, m: str) -> Fraction:
        return sum((v for (s, mm), v in self.joint.items() if mm == m), Fraction(0))

    def posterior(self, m: str) -> dict[str, Fraction]:
        mass = self.message_mass(m)
        if mass == 0:
            raise ValueError(f"message {m!r} has zero probability")
        return {s: v / mass for (s, mm), v in self.joint.items() if mm == m}


def make_test(p: PersuasionProblem, messages: Sequence[str], joint: Mapping[Cell, object]) -> Test:
    messages = tuple(messages)
    if len(set(messages)) != len(messages):
        raise ValueError("duplicate message labels")
    dense: dict[Cell, Fraction] = {}
    for (s, m) in joint:
        if s not in p.prior or m not in messages:
            raise ValueError(f"unknown cell {(s, m)!r}")
    for s in p.states:
        for m in messages:
            v = to_scalar(joint.get((s, m), 0))
            if v < 0:
                raise ValueError(f"negative probability at {(s, m)}")
            dense[s, m] = v
        row = sum((dense[s, m] for m in messages), Fraction(0))
        if row != p.prior[s]:
            raise ValueError(f"state marginal at {s!r} is {row}, prior is {p.prior[s]}")
    return Test(messages, dense)


@dataclass(frozen=True)
class ReceiverStrategy:
    choice: Mapping[str, str]

    def __call__(self, m: str) -> str:
        return self.choice[m]


def outcome_from_profile(p: PersuasionProblem, t: Test, s: ReceiverStrategy) -> OutcomeDistribution:
    """Push the test forward through the Receiver's strategy."""
    prob = {c: Fraction(0) for c in p.cells()}
    for m in t.messages:
        mass = t.message_mass(m)
        if m not in s.choice:
            if mass > 0:
                raise ValueError(f"incomplete strategy: no action for message {m!r}")
            continue
        a = s.choice[m]
        if a not in p.actions:
            raise ValueError(f"strategy maps {m!r} to unknown action {a!r}")
        for st in p.states:
            prob[st, a] += t[st, m]
    return make_outcome(p, prob)


def canonical_profile(p: PersuasionProblem, o: OutcomeDistribution) -> tuple[Test, ReceiverStrategy]:
    """Messages = actions, test = outcome, strategy = identity."""
    t = Test(tuple(p.actions), dict(o.prob))
    return t, ReceiverStrategy({a: a for a in p.actions})


def expected_payoffs(p: PersuasionProblem, o: OutcomeDistribution) -> tuple[Fraction, Fraction]:
    sender = sum((v * p.u_s[c] for c, v in o.prob.items()), Fraction(0))
    receiver = sum((v * p.u_r[c] for c, v in o.prob.items()), Fraction(0))
    return sender, receiver


def profile_payoffs(p: PersuasionProblem, t: Test, s: ReceiverStrategy) -> tuple[Fraction, Fraction]:
    sender = Fraction(0)
    receiver = Fraction(0)
    for (st, m), v in t.joint.items():
        if v:
            a = s.choice[m]
            sender += v * p.u_s[st, a]
            receiver += v * p.u_r[st, a]
    return sender, receiver


def expected_receiver_payoff(p: PersuasionProblem, belief: Mapping[str, Fraction], a: str) -> Fraction:
    return sum((w * p.u_r[s, a] for s, w in belief.items()), Fraction(0))


def best_responses(p: PersuasionProblem, belief: Mapping[str, Fraction]) -> list[str]:
    """All Receiver best responses to an (unnormalised) belief, in action order."""
    values = {a: expected_receiver_payoff(p, belief, a) for a in p.actions}
    top = max(values.values())
    return [a for a in p.actions if values[a] == top]


@dataclass(frozen=True)
class TaggedOutcome:
    outcome: OutcomeDistribution
    action: str
    sender_payoff: Fraction
    tags: tuple[str, ...] = field(default=())


def no_information_outcomes(p: PersuasionProblem) -> list[TaggedOutcome]:
    """One outcome per prior best response; tags mark Sender-best and -worst."""
    require_valid(p)
    out = []
    for a in best_responses(p, p.prior):
        prob = {c: Fraction(0) for c in p.cells()}
        for s in p.states:
            prob[s, a] = p.prior[s]
        o = OutcomeDistribution(prob)
        out.append((a, o, expected_payoffs(p, o)[0]))
    best = max(v for _, _, v in out)
    worst = min(v for _, _, v in out)
    best_a = next(a for a, _, v in out if v == best)
    worst_a = next(a for a, _, v in out if v == worst)
    result = []
    for a, o, v in out:
        tags = []
        if a == best_a:
            tags.append("sender-best")
        if a == worst_a:
            tags.append("sender-worst")
        result.append(TaggedOutcome(o, a, v, tuple(tags)))
    return result


def no_information_value(p: PersuasionProblem, which: str = "best") -> Fraction:
    values = [t.sender_payoff for t in no_information_outcomes(p)]
    return max(values) if which == "best" else min(values)


def _ordered_actions(p: PersuasionProblem) -> tuple[str, ...]:
    return p.action_order if p.action_order is not None else p.actions


def fully_revealing_outcome(p: PersuasionProblem, tiebreak: str = "sender-best") -> OutcomeDistribution:
    """Each state's prior mass on a Receiver best response to that state.

    ``lowest-action``/``highest-action`` use the declared action order (input
    order if none was declared).
    """
    if tiebreak not in TIEBREAKS:
        raise ValueError(f"tiebreak must be one of {TIEBREAKS}")
    require_valid(p)
    order = _ordered_actions(p)
    prob = {c: Fraction(0) for c in p.cells()}
    for s in p.states:
        ties = best_responses(p, {s: Fraction(1)})
        if tiebreak == "lowest-action":
            a = min(ties, key=order.index)
        elif tiebreak == "highest-action":
            a = max(ties, key=order.index)
        else:
            a = max(ties, key=lambda x: (p.u_s[s, x], -order.index(x)))
        prob[s, a] = p.prior[s]
    return OutcomeDistribution(prob)


def mix(o1: OutcomeDistribution, o2: OutcomeDistribution, alpha: Fraction) -> OutcomeDistribution:
    cells = set(o1.prob) | set(o2.prob)
    return OutcomeDistribution({c: alpha * o1[c] + (1 - alpha) * o2[c] for c in cells})


def format_cells(cells: Iterable[Cell]) -> list[list[str]]:
    return [[a, b] for a, b in cells]
