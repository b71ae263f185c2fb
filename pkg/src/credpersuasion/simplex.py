"""Dense two-phase tableau simplex over exact rationals.

Bland's rule (lowest-index entering column, lowest-index leaving basic
variable on ratio ties) is used in both phases, so the method terminates on
degenerate problems without perturbation.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

ZERO = Fraction(0)
ONE = Fraction(1)


@dataclass(frozen=True)
class LPResult:
    status: str  # "optimal" | "infeasible" | "unbounded"
    x: tuple[Fraction, ...] = ()
    value: Fraction | None = None

    @property
    def ok(self) -> bool:
        return self.status == "optimal"


class _Tableau:
    def __init__(self, rows: list[list[Fraction]], rhs: list[Fraction], basis: list[int]):
        self.rows = rows
        self.rhs = rhs
        self.basis = basis

    def pivot(self, r: int, j: int, obj: list[Fraction], objval: list[Fraction]) -> None:
        row = self.rows[r]
        piv = row[j]
        if piv != ONE:
            inv = ONE / piv
            row[:] = [v * inv for v in row]
            self.rhs[r] *= inv
        for i, other in enumerate(self.rows):
            if i != r:
                f = other[j]
                if f:
                    other[:] = [a - f * b if b else a for a, b in zip(other, row)]
                    self.rhs[i] -= f * self.rhs[r]
        f = obj[j]
        if f:
            obj[:] = [a - f * b if b else a for a, b in zip(obj, row)]
            objval[0] += f * self.rhs[r]
        self.basis[r] = j

    def run(self, obj: list[Fraction], objval: list[Fraction], allowed: int) -> str:
        """Maximise; ``obj`` holds reduced costs, ``objval`` the running value."""
        while True:
            j = next((k for k in range(allowed) if obj[k] > 0), None)
            if j is None:
                return "optimal"
            best_r = None
            best_ratio = None
            for i, row in enumerate(self.rows):
                a = row[j]
                if a > 0:
                    ratio = self.rhs[i] / a
                    if (
                        best_ratio is None
                        or ratio < best_ratio
                        or (ratio == best_ratio and self.basis[i] < self.basis[best_r])
                    ):
                        best_r, best_ratio = i, ratio
            if best_r is None:
                return "unbounded"
            self.pivot(best_r, j, obj, objval)


def _frac_matrix(A) -> list[list[Fraction]]:
    return [[Fraction(v) for v in row] for row in (A or [])]


def linprog(
    c: Sequence,
    A_ub: Sequence[Sequence] | None = None,
    b_ub: Sequence | None = None,
    A_eq: Sequence[Sequence] | None = None,
    b_eq: Sequence | None = None,
    maximize: bool = True,
) -> LPResult:
    """Solve ``max/min c·x`` s.t. ``A_ub x <= b_ub``, ``A_eq x = b_eq``, ``x >= 0``.

    Returns a basic (vertex) optimal solution with exact rational entries.
    """
    n = len(c)
    cost = [Fraction(v) for v in c]
    if not maximize:
        cost = [-v for v in cost]
    Aub = _frac_matrix(A_ub)
    bub = [Fraction(v) for v in (b_ub or [])]
    Aeq = _frac_matrix(A_eq)
    beq = [Fraction(v) for v in (b_eq or [])]
    if len(Aub) != len(bub) or len(Aeq) != len(beq):
        raise ValueError("constraint matrix and right-hand side lengths differ")
    m_ub, m_eq = len(Aub), len(Aeq)
    m = m_ub + m_eq
    # columns: x (n) | slacks (m_ub) | artificials (m)
    width = n + m_ub + m
    rows: list[list[Fraction]] = []
    rhs: list[Fraction] = []
    for i in range(m):
        if i < m_ub:
            coeffs, b = Aub[i], bub[i]
        else:
            coeffs, b = Aeq[i - m_ub], beq[i - m_ub]
        if len(coeffs) != n:
            raise ValueError("constraint row has wrong length")
        row = [ZERO] * width
        row[:n] = coeffs
        if i < m_ub:
            row[n + i] = ONE
        sign = -1 if b < 0 else 1
        if sign < 0:
            row = [-v for v in row]
            b = -b
        row[n + m_ub + i] = ONE
        rows.append(row)
        rhs.append(b)
    tab = _Tableau(rows, rhs, [n + m_ub + i for i in range(m)])

    # phase 1: maximise -sum(artificials)
    obj = [ZERO] * width
    objval = [ZERO]
    for i in range(m):
        for k in range(n + m_ub):
            obj[k] += rows[i][k]
        objval[0] -= rhs[i]
    # objval tracks -(sum of artificials); reduced costs of artificials are 0
    status = tab.run(obj, objval, n + m_ub)
    if status != "optimal" or objval[0] != 0:
        return LPResult("infeasible")

    # drive zero-valued artificials out of the basis; drop redundant rows
    i = 0
    while i < len(tab.rows):
        if tab.basis[i] >= n + m_ub:
            row = tab.rows[i]
            j = next((k for k in range(n + m_ub) if row[k] != 0), None)
            if j is None:
                del tab.rows[i], tab.rhs[i], tab.basis[i]
                continue
            tab.pivot(i, j, [ZERO] * width, [ZERO])
        i += 1
    for row in tab.rows:
        del row[n + m_ub:]

    # phase 2
    width2 = n + m_ub
    obj2 = cost + [ZERO] * m_ub
    objval2 = [ZERO]
    for r, b in enumerate(tab.basis):
        f = obj2[b]
        if f:
            obj2 = [a - f * v for a, v in zip(obj2, tab.rows[r])]
            objval2[0] += f * tab.rhs[r]
    status = tab.run(obj2, objval2, width2)
    if status != "optimal":
        return LPResult(status)
    x = [ZERO] * width2
    for r, b in enumerate(tab.basis):
        x[b] = tab.rhs[r]
    value = objval2[0] if maximize else -objval2[0]
    return LPResult("optimal", tuple(x[:n]), value)
