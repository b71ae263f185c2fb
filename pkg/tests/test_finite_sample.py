import random
from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from credpersuasion import finite_sample as fs
from credpersuasion import transport as tr
from credpersuasion.core import ReceiverStrategy, canonical_profile, make_outcome

from oracles import nearest_quota_by_enumeration


def test_sample_single_draw_and_determinism():
    prior = {"L": F(7, 10), "H": F(3, 10)}
    one = fs.sample_empirical(prior, 1, 5)
    assert sorted(one.counts.values()) == [0, 1]
    assert fs.sample_empirical(prior, 500, 9) == fs.sample_empirical(prior, 500, 9)


def test_sample_concentrates():
    # binomial sd at N=10^6 is about 4.6e-4, so the band is roughly 6.5 sd wide
    e = fs.sample_empirical({"L": F(7, 10), "H": F(3, 10)}, 10**6, 2024)
    assert 0.297 <= e.counts["H"] / 10**6 <= 0.303


def test_nearest_quota_examples():
    assert fs.nearest_quota({"a": F(3, 5), "b": F(2, 5)}, 5).counts == {"a": 3, "b": 2}
    q = fs.nearest_quota({"a": F(3, 5), "b": F(2, 5)}, 3)
    assert q.counts == {"a": 2, "b": 1}
    assert fs.sup_distance(q.pmf(), {"a": F(3, 5), "b": F(2, 5)}) == F(1, 15)
    assert fs.nearest_quota({"a": F(1), "b": F(0)}, 7).counts == {"a": 7, "b": 0}


@settings(max_examples=200, deadline=None)
@given(st.lists(st.integers(0, 9), min_size=1, max_size=4).filter(any), st.integers(1, 12))
def test_nearest_quota_is_optimal(weights, n):
    target = {f"m{i}": F(w, sum(weights)) for i, w in enumerate(weights)}
    q = fs.nearest_quota(target, n)
    assert sum(q.counts.values()) == n
    assert fs.sup_distance(q.pmf(), target) == nearest_quota_by_enumeration(target, n)


def test_assignment_school(schoolp):
    emp = fs.EmpiricalDistribution(10, {"H": 3, "L": 7})
    quota = fs.EmpiricalDistribution(10, {"Hire": 6, "NotHire": 4})
    cost = {(s, a): schoolp.u_s[s, a] for s in schoolp.states for a in schoolp.actions}
    res = fs.optimal_assignment(emp, quota, cost)
    assert res.counts == {("H", "Hire"): 3, ("H", "NotHire"): 0, ("L", "Hire"): 3, ("L", "NotHire"): 4}
    assert res.value == F(9, 10)


def test_assignment_usedcar_swaps_good_cars(usedcar):
    emp = fs.EmpiricalDistribution(10, {"H": 3, "L": 7})
    quota = fs.EmpiricalDistribution(10, {"pass": 6, "fail": 4})
    cost = fs.profile_cost(usedcar, ["pass", "fail"], ReceiverStrategy({"pass": "Buy", "fail": "NotBuy"}))
    res = fs.optimal_assignment(emp, quota, cost)
    assert res.counts["H", "fail"] == 3 and res.value == F(15, 10)


def test_assignment_single_column(schoolp):
    emp = fs.EmpiricalDistribution(4, {"H": 1, "L": 3})
    quota = fs.EmpiricalDistribution(4, {"m0": 4})
    cost = {("H", "m0"): F(2), ("L", "m0"): F(1)}
    assert fs.optimal_assignment(emp, quota, cost).value == F(5, 4)


def test_assignment_size_mismatch():
    with pytest.raises(ValueError, match="sample sizes differ"):
        fs.optimal_assignment(fs.EmpiricalDistribution(2, {"a": 2}), fs.EmpiricalDistribution(3, {"x": 3}), {("a", "x"): F(0)})


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 10**9))
def test_assignment_integral_and_optimal(seed):
    rng = random.Random(seed)
    m, k, n = rng.randint(1, 4), rng.randint(1, 4), rng.randint(1, 40)
    rows = [f"s{i}" for i in range(m)]
    cols = [f"m{j}" for j in range(k)]

    def counts(labels):
        cuts = sorted(rng.randint(0, n) for _ in range(len(labels) - 1))
        parts = [b - a for a, b in zip([0] + cuts, cuts + [n])]
        return fs.EmpiricalDistribution(n, dict(zip(labels, parts)))

    emp, quota = counts(rows), counts(cols)
    cost = {(r, c): F(rng.randint(-5, 5)) for r in rows for c in cols}
    res = fs.optimal_assignment(emp, quota, cost)
    for r in rows:
        assert sum(res.counts[r, c] for c in cols) == emp.counts[r]
    for c in cols:
        assert sum(res.counts[r, c] for r in rows) == quota.counts[c]
    _, best = tr.solve_transport(emp.pmf(), quota.pmf(), cost)
    assert res.value == best


def test_strict_school_profile():
    p, t, s = fs.strict_school_profile()
    assert fs.check_strict_profile(p, t, s) == (True, True)


def test_simulate_rejects_non_strict(usedcar):
    o = make_outcome(usedcar, {("H", "Buy"): "3/10", ("L", "Buy"): "3/10", ("L", "NotBuy"): "2/5"})
    t, s = canonical_profile(usedcar, o)
    with pytest.raises(ValueError, match="profile not strictly credible/strictly R-IC"):
        fs.simulate(usedcar, t, s, 10, 1, F(1, 20))


def test_simulate_smoke_and_determinism():
    p, t, s = fs.strict_school_profile()
    rep = fs.simulate(p, t, s, 1, 1, F(1, 20), seed=3)
    assert rep.trials == 1 and rep.hits in (0, 1)
    a = fs.simulate(p, t, s, 200, 30, F(1, 20), seed=4)
    b = fs.simulate(p, t, s, 200, 30, F(1, 20), seed=4, threads=3)
    assert a == b


def test_non_credible_profile_does_not_concentrate(usedcar):
    o = make_outcome(usedcar, {("H", "Buy"): "3/10", ("L", "Buy"): "3/10", ("L", "NotBuy"): "2/5"})
    t, s = canonical_profile(usedcar, o)
    rep = fs.convergence(usedcar, t, s, [100, 1000], 40, F(1, 20), seed=1, require_strict=False)
    assert all(r.hits == 0 for r in rep.rows)


def test_convergence_csv():
    p, t, s = fs.strict_school_profile()
    rep = fs.convergence(p, t, s, [50, 500], 20, F(1, 20), seed=2)
    lines = rep.to_csv().splitlines()
    assert lines[0].startswith("N,trials") and len(lines) == 3
