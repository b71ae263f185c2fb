"""Reading and writing problem, outcome, profile and lemons files.

Files are YAML (JSON is accepted too, being a subset).  Every scalar is read
as a string and converted with :func:`core.to_scalar`, so ``0.7`` and ``7/10``
both become the rational 7/10 with no float in between.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Any

import yaml

from .core import (
    OutcomeDistribution,
    PersuasionProblem,
    ReceiverStrategy,
    Test,
    make_outcome,
    make_test,
    to_scalar,
)
from .lemons import LemonsProblem, LemonsTest, make_lemons_test


class InputError(ValueError):
    """Bad input, with a 1-based line/column when the location is known."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.message = message
        self.line = line
        self.column = column
        where = f"line {line}, column {column}: " if line is not None else ""
        super().__init__(where + message)


@dataclass(frozen=True)
class Located:
    """Parsed YAML value that remembers where it came from."""

    value: Any
    line: int
    column: int

    def fail(self, message: str):
        raise InputError(message, self.line, self.column)


def _wrap(node: yaml.Node) -> Located:
    mark = node.start_mark
    if isinstance(node, yaml.ScalarNode):
        value: Any = node.value
    elif isinstance(node, yaml.SequenceNode):
        value = [_wrap(n) for n in node.value]
    else:
        value = {}
        for k, v in node.value:
            if not isinstance(k, yaml.ScalarNode):
                raise InputError("mapping keys must be scalars", k.start_mark.line + 1, k.start_mark.column + 1)
            if k.value in value:
                raise InputError(f"duplicate key {k.value!r}", k.start_mark.line + 1, k.start_mark.column + 1)
            value[k.value] = _wrap(v)
    return Located(value, mark.line + 1, mark.column + 1)


def parse_document(text: str) -> Located:
    try:
        node = yaml.compose(text, Loader=yaml.BaseLoader)
    except yaml.MarkedYAMLError as exc:
        mark = exc.problem_mark or exc.context_mark
        line = mark.line + 1 if mark else None
        col = mark.column + 1 if mark else None
        raise InputError(f"unparseable file: {exc.problem or exc}", line, col) from None
    if node is None:
        raise InputError("empty document", 1, 1)
    return _wrap(node)


def _field(doc: Located, name: str, required: bool = True) -> Located | None:
    if not isinstance(doc.value, dict):
        doc.fail("expected a mapping at the top level")
    if name not in doc.value:
        if required:
            doc.fail(f"missing field {name!r}")
        return None
    return doc.value[name]


def _labels(node: Located, what: str) -> list[str]:
    if not isinstance(node.value, list) or not node.value:
        node.fail(f"{what} must be a nonempty list")
    out = []
    for item in node.value:
        if not isinstance(item.value, str):
            item.fail(f"{what} entries must be labels")
        out.append(item.value)
    if len(set(out)) != len(out):
        node.fail(f"duplicate labels in {what}")
    return out


def _number(node: Located) -> Fraction:
    if not isinstance(node.value, str):
        node.fail("expected a number")
    try:
        return to_scalar(node.value)
    except ValueError as exc:
        node.fail(str(exc))


def _vector(node: Located, keys: list[str], what: str) -> dict[str, Fraction]:
    """A list aligned with ``keys`` or a mapping keyed by them."""
    if isinstance(node.value, list):
        if len(node.value) != len(keys):
            node.fail(f"{what} needs {len(keys)} entries")
        return {k: _number(v) for k, v in zip(keys, node.value)}
    if isinstance(node.value, dict):
        extra = set(node.value) - set(keys)
        if extra:
            node.fail(f"{what} has unknown keys {sorted(extra)}")
        missing = [k for k in keys if k not in node.value]
        if missing:
            node.fail(f"{what} is missing {missing}")
        return {k: _number(node.value[k]) for k in keys}
    node.fail(f"{what} must be a list or mapping")


def _matrix(node: Located, rows: list[str], cols: list[str], what: str) -> dict[tuple[str, str], Fraction]:
    if isinstance(node.value, list):
        if len(node.value) != len(rows):
            node.fail(f"{what} needs one row per state")
        seq = list(zip(rows, node.value))
    elif isinstance(node.value, dict):
        missing = [r for r in rows if r not in node.value]
        if missing:
            node.fail(f"{what} is missing rows {missing}")
        seq = [(r, node.value[r]) for r in rows]
    else:
        node.fail(f"{what} must be a list of rows or a mapping")
    out = {}
    for r, row in seq:
        for c, v in _vector(row, cols, f"{what} row {r!r}").items():
            out[r, c] = v
    return out


def problem_from_doc(doc: Located) -> PersuasionProblem:
    states = _labels(_field(doc, "states"), "states")
    actions = _labels(_field(doc, "actions"), "actions")
    prior = _vector(_field(doc, "prior"), states, "prior")
    u_s = _matrix(_field(doc, "u_S"), states, actions, "u_S")
    u_r = _matrix(_field(doc, "u_R"), states, actions, "u_R")
    orders = []
    for name, labels in (("order_states", states), ("order_actions", actions)):
        node = _field(doc, name, required=False)
        if node is None:
            orders.append(None)
            continue
        order = _labels(node, name)
        if sorted(order) != sorted(labels):
            node.fail(f"{name} must be a permutation of the declared labels")
        orders.append(order)
    return PersuasionProblem.from_rows(states, actions, prior, u_s, u_r, orders[0], orders[1])


def load_problem(text: str) -> PersuasionProblem:
    return problem_from_doc(parse_document(text))


def _as_outcome(p: PersuasionProblem, node: Located) -> OutcomeDistribution:
    prob = _matrix(node, list(p.states), list(p.actions), "outcome")
    try:
        return make_outcome(p, prob)
    except ValueError as exc:
        node.fail(str(exc))


def load_outcome(p: PersuasionProblem, text: str) -> OutcomeDistribution:
    """Outcome file: ``outcome`` as rows per state (or a mapping state → action → value)."""
    doc = parse_document(text)
    if isinstance(doc.value, dict) and "outcome" in doc.value:
        doc = doc.value["outcome"]
    return _as_outcome(p, doc)


def load_profile(p: PersuasionProblem, text: str) -> tuple[Test, ReceiverStrategy]:
    """Profile file: ``messages``, ``test`` (rows per state) and ``sigma`` (message → action)."""
    doc = parse_document(text)
    messages = _labels(_field(doc, "messages"), "messages")
    tnode = _field(doc, "test")
    joint = _matrix(tnode, list(p.states), messages, "test")
    try:
        t = make_test(p, messages, joint)
    except ValueError as exc:
        tnode.fail(str(exc))
    snode = _field(doc, "sigma")
    if not isinstance(snode.value, dict):
        snode.fail("sigma must map messages to actions")
    choice = {}
    for m in messages:
        if m not in snode.value:
            snode.fail(f"sigma has no action for message {m!r}")
        a = snode.value[m].value
        if a not in p.actions:
            snode.value[m].fail(f"unknown action {a!r}")
        choice[m] = a
    return t, ReceiverStrategy(choice)


def load_lemons(text: str) -> tuple[LemonsProblem, LemonsTest | None]:
    """Lemons file: ``types``, ``prior``, ``v`` lists and an optional ``test``.

    ``test`` has ``messages`` and ``rows`` (one row per type, aligned with messages).
    """
    doc = parse_document(text)
    tnode = _field(doc, "types")
    if not isinstance(tnode.value, list) or not tnode.value:
        tnode.fail("types must be a nonempty list")
    types = [_number(n) for n in tnode.value]
    keys = [str(t) for t in types]
    prior = _vector(_field(doc, "prior"), keys, "prior")
    v = _vector(_field(doc, "v"), keys, "v")
    lp = LemonsProblem.build(types, [prior[k] for k in keys], [v[k] for k in keys])
    errs = lp.validate()
    if errs:
        doc.fail("; ".join(errs))
    test_node = _field(doc, "test", required=False)
    if test_node is None:
        return lp, None
    messages = _labels(_field(test_node, "messages"), "messages")
    rows = _matrix(_field(test_node, "rows"), keys, messages, "test rows")
    try:
        t = make_lemons_test(lp, messages, {(Fraction(k), m): val for (k, m), val in rows.items()})
    except ValueError as exc:
        test_node.fail(str(exc))
    return lp, t


# ---------------------------------------------------------------------------
# writing


def dump_problem(p: PersuasionProblem) -> str:
    doc: dict[str, Any] = {
        "states": list(p.states),
        "actions": list(p.actions),
        "prior": [str(p.prior[s]) for s in p.states],
        "u_S": [[str(p.u_s[s, a]) for a in p.actions] for s in p.states],
        "u_R": [[str(p.u_r[s, a]) for a in p.actions] for s in p.states],
    }
    if p.state_order is not None:
        doc["order_states"] = list(p.state_order)
    if p.action_order is not None:
        doc["order_actions"] = list(p.action_order)
    return yaml.safe_dump(doc, sort_keys=False, default_flow_style=None)


def dump_outcome(p: PersuasionProblem, o: OutcomeDistribution) -> str:
    doc = {"outcome": {s: {a: str(o[s, a]) for a in p.actions} for s in p.states}}
    return yaml.safe_dump(doc, sort_keys=False, default_flow_style=None)


def dump_lemons(lp: LemonsProblem) -> str:
    doc = {
        "types": [str(t) for t in lp.types],
        "prior": [str(lp.prior[t]) for t in lp.types],
        "v": [str(lp.v[t]) for t in lp.types],
    }
    return yaml.safe_dump(doc, sort_keys=False, default_flow_style=None)
