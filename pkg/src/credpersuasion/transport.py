"""Exact finite optimal transport (maximisation form).

Three views of the same object live here and are kept independent of each
other so they can cross-check:

* the primal LP, solved by a transportation simplex seeded with the
  northwest corner rule (:func:`solve_transport`);
* cyclical monotonicity of a coupling, decided by negative-cycle detection
  on the exchange graph of its support cells
  (:func:`check_cyclical_monotonicity`);
* column potentials ``psi`` with ``u(x,y) - psi(y) >= u(x,y') - psi(y')`` on
  the support, verified by brute force (:func:`verify_potentials`).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from .simplex import linprog

Cell = tuple[str, str]
CostMatrix = Mapping[Cell, Fraction]

ZERO = Fraction(0)


@dataclass(frozen=True)
class Coupling:
    rows: tuple[str, ...]
    cols: tuple[str, ...]
    joint: Mapping[Cell, Fraction]

    def __getitem__(self, cell: Cell) -> Fraction:
        return self.joint.get(cell, ZERO)

    def support(self) -> list[Cell]:
        return [(x, y) for x in self.rows for y in self.cols if self[x, y] > 0]

    def row_marginal(self) -> dict[str, Fraction]:
        return {x: sum((self[x, y] for y in self.cols), ZERO) for x in self.rows}

    def col_marginal(self) -> dict[str, Fraction]:
        return {y: sum((self[x, y] for x in self.rows), ZERO) for y in self.cols}

    def value(self, cost: CostMatrix) -> Fraction:
        return sum((v * cost[c] for c, v in self.joint.items() if v), ZERO)


def make_coupling(rows: Sequence[str], cols: Sequence[str], joint: Mapping[Cell, object]) -> Coupling:
    rows, cols = tuple(rows), tuple(cols)
    dense = {(x, y): Fraction(joint.get((x, y), 0)) for x in rows for y in cols}
    if any(v < 0 for v in dense.values()):
        raise ValueError("negative mass in coupling")
    return Coupling(rows, cols, dense)


def _check_marginals(mu: Mapping[str, Fraction], nu: Mapping[str, Fraction]) -> None:
    if any(v < 0 for v in mu.values()) or any(v < 0 for v in nu.values()):
        raise ValueError("marginals must be nonnegative")
    if sum(mu.values(), ZERO) != sum(nu.values(), ZERO):
        raise ValueError("marginals have different total mass")


# ---------------------------------------------------------------------------
# northwest corner + transportation simplex


def _northwest_basis(a: list, b: list) -> tuple[dict[tuple[int, int], Fraction], list[tuple[int, int]]]:
    """Greedy fill; returns flows and a spanning-tree basis of m+n-1 cells."""
    a, b = list(a), list(b)
    m, n = len(a), len(b)
    flows: dict[tuple[int, int], Fraction] = {}
    basis = []
    i = j = 0
    while True:
        x = min(a[i], b[j])
        flows[i, j] = x
        basis.append((i, j))
        a[i] -= x
        b[j] -= x
        if i == m - 1 and j == n - 1:
            break
        if (a[i] == 0 and i < m - 1) or j == n - 1:
            i += 1
        else:
            j += 1
    return flows, basis


def northwest_corner(mu: Mapping[str, Fraction], nu: Mapping[str, Fraction]) -> Coupling:
    """Feasible coupling by greedy fill in declared row/column order."""
    _check_marginals(mu, nu)
    rows, cols = tuple(mu), tuple(nu)
    flows, _ = _northwest_basis([mu[x] for x in rows], [nu[y] for y in cols])
    joint = {(x, y): ZERO for x in rows for y in cols}
    for (i, j), v in flows.items():
        joint[rows[i], cols[j]] = v
    return Coupling(rows, cols, joint)


def _duals(m: int, n: int, C, basis) -> tuple[list, list]:
    u: list = [None] * m
    v: list = [None] * n
    u[0] = ZERO
    by_row: dict[int, list[int]] = {}
    by_col: dict[int, list[int]] = {}
    for i, j in basis:
        by_row.setdefault(i, []).append(j)
        by_col.setdefault(j, []).append(i)
    stack = [("r", 0)]
    while stack:
        kind, k = stack.pop()
        if kind == "r":
            for j in by_row.get(k, ()):
                if v[j] is None:
                    v[j] = C[k][j] - u[k]
                    stack.append(("c", j))
        else:
            for i in by_col.get(k, ()):
                if u[i] is None:
                    u[i] = C[i][k] - v[k]
                    stack.append(("r", i))
    return u, v


def _tree_path(basis, m: int, start_row: int, end_col: int) -> list[tuple[int, int]]:
    """Basic cells on the tree path from row node ``start_row`` to column ``end_col``."""
    adj: dict[tuple[str, int], list[tuple[tuple[str, int], tuple[int, int]]]] = {}
    for i, j in basis:
        adj.setdefault(("r", i), []).append((("c", j), (i, j)))
        adj.setdefault(("c", j), []).append((("r", i), (i, j)))
    start, goal = ("r", start_row), ("c", end_col)
    prev: dict = {start: None}
    queue = [start]
    for node in queue:
        if node == goal:
            break
        for nxt, cell in adj.get(node, ()):
            if nxt not in prev:
                prev[nxt] = (node, cell)
                queue.append(nxt)
    path = []
    node = goal
    while prev[node] is not None:
        node, cell = prev[node]
        path.append(cell)
    path.reverse()
    return path


@dataclass(frozen=True)
class TransportSolution:
    coupling: Coupling
    value: Fraction
    basis: tuple[Cell, ...]
    reduced_costs: Mapping[Cell, Fraction]
    row_potential: Mapping[str, Fraction]
    col_potential: Mapping[str, Fraction]
    pivots: int

    def strictly_unique_certificate(self) -> bool:
        """All nonbasic reduced costs strictly negative (sufficient for uniqueness)."""
        return all(r < 0 for r in self.reduced_costs.values())


def transport_simplex(
    mu: Mapping[str, Fraction], nu: Mapping[str, Fraction], cost: CostMatrix, max_pivots: int = 100_000
) -> TransportSolution:
    _check_marginals(mu, nu)
    rows, cols = tuple(mu), tuple(nu)
    m, n = len(rows), len(cols)
    C = [[Fraction(cost[x, y]) for y in cols] for x in rows]
    flows, basis = _northwest_basis([mu[x] for x in rows], [nu[y] for y in cols])
    for i in range(m):
        for j in range(n):
            flows.setdefault((i, j), ZERO)
    basis_set = set(basis)
    pivots = 0
    while True:
        u, v = _duals(m, n, C, basis_set)
        entering = None
        for i in range(m):
            for j in range(n):
                if (i, j) not in basis_set and C[i][j] - u[i] - v[j] > 0:
                    entering = (i, j)
                    break
            if entering:
                break
        if entering is None:
            break
        pivots += 1
        if pivots > max_pivots:
            raise RuntimeError("transportation simplex did not terminate")
        i0, j0 = entering
        path = _tree_path(basis_set, m, i0, j0)
        # cycle: entering (+), then path cells alternate -, +, -, ...
        minus = path[0::2]
        plus = path[1::2]
        theta = min(flows[c] for c in minus)
        leaving = min((c for c in minus if flows[c] == theta), key=lambda c: c[0] * n + c[1])
        for c in minus:
            flows[c] -= theta
        for c in plus:
            flows[c] += theta
        flows[entering] += theta
        basis_set.remove(leaving)
        basis_set.add(entering)
    u, v = _duals(m, n, C, basis_set)
    joint = {(rows[i], cols[j]): flows[i, j] for i in range(m) for j in range(n)}
    coupling = Coupling(rows, cols, joint)
    reduced = {
        (rows[i], cols[j]): C[i][j] - u[i] - v[j]
        for i in range(m)
        for j in range(n)
        if (i, j) not in basis_set
    }
    return TransportSolution(
        coupling=coupling,
        value=coupling.value({(rows[i], cols[j]): C[i][j] for i in range(m) for j in range(n)}),
        basis=tuple(sorted(((rows[i], cols[j]) for i, j in basis_set), key=lambda c: (rows.index(c[0]), cols.index(c[1])))),
        reduced_costs=reduced,
        row_potential=dict(zip(rows, u)),
        col_potential=dict(zip(cols, v)),
        pivots=pivots,
    )


def solve_transport(
    mu: Mapping[str, Fraction], nu: Mapping[str, Fraction], cost: CostMatrix
) -> tuple[Coupling, Fraction]:
    """Vertex-optimal coupling maximising ``sum pi * cost`` and the optimal value."""
    sol = transport_simplex(mu, nu, cost)
    return sol.coupling, sol.value


def is_unique_optimum(c: Coupling, cost: CostMatrix) -> bool:
    """True iff ``c`` is the only maximiser over couplings with its marginals.

    A coupling whose support carries a cycle can always be perturbed along it,
    so uniqueness needs an acyclic support; given that, any other optimum must
    put mass outside ``supp(c)``, which one LP over the optimal face rules out.
    """
    mu, nu = c.row_marginal(), c.col_marginal()
    sol = transport_simplex(mu, nu, cost)
    if c.value(cost) != sol.value:
        return False
    if _support_has_cycle(c.support()):
        return False
    if sol.coupling.joint == c.joint and sol.strictly_unique_certificate():
        return True
    cells = [(x, y) for x in c.rows for y in c.cols]
    supp = set(c.support())
    A_eq, b_eq = [], []
    for x in c.rows:
        A_eq.append([1 if cx == x else 0 for cx, _ in cells])
        b_eq.append(mu[x])
    for y in c.cols:
        A_eq.append([1 if cy == y else 0 for _, cy in cells])
        b_eq.append(nu[y])
    A_eq.append([cost[cell] for cell in cells])
    b_eq.append(sol.value)
    objective = [0 if cell in supp else 1 for cell in cells]
    res = linprog(objective, A_eq=A_eq, b_eq=b_eq, maximize=True)
    return res.ok and res.value == 0


def _support_has_cycle(cells: Sequence[Cell]) -> bool:
    parent: dict = {}

    def find(a):
        while parent.setdefault(a, a) != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for x, y in cells:
        rx, ry = find(("r", x)), find(("c", y))
        if rx == ry:
            return True
        parent[rx] = ry
    return False


# ---------------------------------------------------------------------------
# cyclical monotonicity


@dataclass(frozen=True)
class CmReport:
    """``witness`` lists cells in cycle order: cell i's mass moves to cell i+1's column."""

    holds: bool
    witness: tuple[Cell, ...] | None = None
    violation: Fraction | None = None
    potentials: Mapping[str, Fraction] | None = field(default=None)


def cycle_gain(cycle: Sequence[Cell], cost: CostMatrix) -> Fraction:
    """Payoff change from shifting unit mass around ``cycle``."""
    k = len(cycle)
    return sum(
        (cost[cycle[i][0], cycle[(i + 1) % k][1]] - cost[cycle[i]] for i in range(k)),
        ZERO,
    )


def _bellman_ford(nodes: list[Cell], cost: CostMatrix):
    """Distances from a virtual source on the exchange graph; returns (dist, cycle|None)."""
    k = len(nodes)
    dist = [ZERO] * k
    pred: list[int | None] = [None] * k
    w = [[cost[p] - cost[p[0], q[1]] for q in nodes] for p in nodes]
    last = None
    for _ in range(k + 1):
        last = None
        for a in range(k):
            da = dist[a]
            wa = w[a]
            for b in range(k):
                if a != b:
                    nd = da + wa[b]
                    if nd < dist[b]:
                        dist[b] = nd
                        pred[b] = a
                        last = b
        if last is None:
            return dist, None
    # walk back into the cycle
    x = last
    for _ in range(k):
        x = pred[x]
    cycle = [x]
    y = pred[x]
    while y != x:
        cycle.append(y)
        y = pred[y]
    cycle.reverse()  # arcs now run cycle[i] -> cycle[i+1]
    return dist, [nodes[i] for i in cycle]


def _minimize_cycle(cycle: list[Cell], cost: CostMatrix) -> list[Cell]:
    """Split at repeated rows/columns until each appears once, keeping a profitable piece."""
    while True:
        k = len(cycle)
        split = None
        for i in range(k):
            for j in range(i + 1, k):
                if cycle[i][1] == cycle[j][1] or cycle[i][0] == cycle[j][0]:
                    split = (i, j)
                    break
            if split:
                break
        if split is None:
            return cycle
        i, j = split
        if cycle[i][1] == cycle[j][1]:
            # incoming arcs depend only on the target column
            first = cycle[i:j]
            second = cycle[j:] + cycle[:i]
        else:
            # outgoing arcs from the two same-row cells swap targets
            first = cycle[i:i + 1] + cycle[j + 1:] + cycle[:i]
            second = cycle[j:j + 1] + cycle[i + 1:j]
        # gains of the two pieces add up to the original, so the better one is profitable
        cycle = max((first, second), key=lambda piece: (cycle_gain(piece, cost), -len(piece)))


def check_cyclical_monotonicity(c: Coupling, cost: CostMatrix) -> CmReport:
    supp = c.support()
    return _cm_of_support(supp, c.rows, c.cols, cost)


def _cm_of_support(supp: list[Cell], rows: Sequence[str], cols: Sequence[str], cost: CostMatrix) -> CmReport:
    dist, cycle = _bellman_ford(supp, cost)
    if cycle is not None:
        cycle = _minimize_cycle(cycle, cost)
        # rotate so the witness starts at its first cell in row/column order
        start = min(range(len(cycle)), key=lambda i: (rows.index(cycle[i][0]), cols.index(cycle[i][1])))
        cycle = cycle[start:] + cycle[:start]
        return CmReport(False, tuple(cycle), cycle_gain(cycle, cost), None)
    # distances are constant within a column (arc weights depend on the target only via its column)
    col_dist: dict[str, Fraction] = {}
    for cell, d in zip(supp, dist):
        col_dist[cell[1]] = d
    psi = {y: -d for y, d in col_dist.items()}
    for y in cols:
        if y not in psi:
            psi[y] = max(psi[yy] - cost[x, yy] + cost[x, y] for x, yy in supp)
    anchor = psi[cols[0]] if cols else ZERO
    psi = {y: psi[y] - anchor for y in cols}
    return CmReport(True, None, None, psi)


def kantorovich_potentials(c: Coupling, cost: CostMatrix) -> dict[str, Fraction]:
    report = check_cyclical_monotonicity(c, cost)
    if not report.holds:
        raise ValueError("not cyclically monotone")
    return dict(report.potentials)


def verify_potentials(c: Coupling, cost: CostMatrix, psi: Mapping[str, Fraction]) -> bool:
    for x, y in c.support():
        lhs = cost[x, y] - psi[y]
        for y2 in c.cols:
            if lhs < cost[x, y2] - psi[y2]:
                return False
    return True


def potentials_exist_lp(c: Coupling, cost: CostMatrix) -> bool:
    """Feasibility of the potential inequalities, decided by the general LP solver."""
    cols = list(c.cols)
    k = len(cols)
    A_ub, b_ub = [], []
    # psi = p - q with p, q >= 0 (free variables)
    for x, y in c.support():
        for y2 in cols:
            if y2 == y:
                continue
            # psi(y) - psi(y2) <= cost(x,y) - cost(x,y2)
            row = [0] * (2 * k)
            row[cols.index(y)] += 1
            row[cols.index(y2)] -= 1
            row[k + cols.index(y)] -= 1
            row[k + cols.index(y2)] += 1
            A_ub.append(row)
            b_ub.append(cost[x, y] - cost[x, y2])
    if not A_ub:
        return True
    res = linprog([0] * (2 * k), A_ub=A_ub, b_ub=b_ub)
    return res.ok


def apply_cycle(c: Coupling, cycle: Sequence[Cell], eps: Fraction) -> Coupling:
    """Move ``eps`` from each witness cell to the next cell's column."""
    joint = dict(c.joint)
    k = len(cycle)
    for i, (x, y) in enumerate(cycle):
        joint[x, y] -= eps
        joint[x, cycle[(i + 1) % k][1]] += eps
    return Coupling(c.rows, c.cols, joint)


def is_cm_support(cells: Sequence[Cell], cost: CostMatrix, cols: Sequence[str]) -> bool:
    """Cyclical monotonicity of a support set via the column graph.

    Equivalent to the cell-level check but runs Floyd-Warshall on the
    columns only; used where many candidate supports are screened.
    """
    idx = {y: i for i, y in enumerate(cols)}
    k = len(cols)
    INF = None
    d = [[INF] * k for _ in range(k)]
    for x, y in cells:
        a = idx[y]
        for x2, y2 in cells:
            b = idx[y2]
            if a == b:
                continue
            w = cost[x, y] - cost[x, y2]
            if d[a][b] is None or w < d[a][b]:
                d[a][b] = w
    for m in range(k):
        dm = d[m]
        for a in range(k):
            dam = d[a][m]
            if dam is None:
                continue
            da = d[a]
            for b in range(k):
                if dm[b] is not None:
                    nd = dam + dm[b]
                    if da[b] is None or nd < da[b]:
                        da[b] = nd
        if any(d[a][a] is not None and d[a][a] < 0 for a in range(k)):
            return False
    return all(d[a][a] is None or d[a][a] >= 0 for a in range(k))


# ---------------------------------------------------------------------------
# Rochet implementability


@dataclass(frozen=True)
class RochetResult:
    implementable: bool
    transfers: Mapping[str, Fraction] | None
    witness: tuple[tuple[str, str], ...] | None  # (true type, report) pairs
    violation: Fraction | None = None


def rochet_transfers(types: Sequence[str], q: Mapping[str, str], u: CostMatrix) -> RochetResult:
    """Transfers ``psi`` with ``u(t,q(t)) - psi(t) >= u(t,q(t')) - psi(t')`` or a violating cycle."""
    types = tuple(types)
    missing = [t for t in types if t not in q]
    if missing:
        raise ValueError(f"allocation undefined for {missing}")
    w = Fraction(1, len(types))
    diag = Coupling(types, types, {(t, s): (w if t == s else ZERO) for t in types for s in types})
    v_q = {(t, s): u[t, q[s]] for t in types for s in types}
    report = check_cyclical_monotonicity(diag, v_q)
    if report.holds:
        return RochetResult(True, dict(report.potentials), None)
    pairs = tuple((cell[0], report.witness[(i + 1) % len(report.witness)][1]) for i, cell in enumerate(report.witness))
    return RochetResult(False, None, pairs, report.violation)
