import math
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from twr.core import ServiceRequest, ServiceRun, ServiceTour, build_metric, TREE, earliest_schedule, verify_run
from twr.oracle import brute_deliveryman, brute_repairman
from twr.trimming import (
    BOUNDED,
    ONE_TO_TWO,
    UNIT,
    FactorialDigits,
    PeriodGrid,
    factorial_decode,
    factorial_encode,
    limited_loss_candidates,
    racing_factor,
    racing_tour,
    trim_earliest,
    trim_general,
    trim_unit,
)

from conftest import random_instance

H = Fraction(1, 2)


def _req(start, length=1, rid="a"):
    return ServiceRequest(rid, 0, Fraction(start), Fraction(length))


# ---- grids and unit trimming ----

def test_grid_indexing():
    g = PeriodGrid(Fraction(3, 4), Fraction(1, 4))
    assert g.index(Fraction(1, 4)) == 0
    assert g.index(Fraction(1, 5)) == -1
    assert g.interval(1) == (1, Fraction(7, 4))
    assert list(g.contained(Fraction(3, 10), Fraction(19, 10))) == [1]


@pytest.mark.parametrize(
    "start, target",
    [
        (Fraction(3, 10), (H, 1)),
        (H, (H, 1)),
        (Fraction(27, 10), (3, Fraction(7, 2))),
    ],
)
def test_trim_unit_examples(start, target):
    assert trim_unit([_req(start)]).target("a") == target


def test_trim_unit_rejects_other_lengths():
    with pytest.raises(ValueError):
        trim_unit([_req(0, Fraction(3, 2))])


@given(st.fractions(min_value=-20, max_value=20, max_denominator=40))
def test_unit_target_inside_window(start):
    r = _req(start)
    lo, hi = trim_unit([r]).target("a")
    assert r.window_start <= lo and hi <= r.window_end and hi - lo == H


# ---- general trimming ----

def test_trim_general_single_candidate():
    g = PeriodGrid(Fraction(3, 4), Fraction(1, 4))
    for k in range(2):
        tr = trim_general([_req(Fraction(3, 10), Fraction(16, 10))], g, factorial_encode(k, 1))
        assert tr.target("a") == (1, Fraction(7, 4))


def test_trim_general_excludes_short_window():
    tr = trim_general([_req(0, Fraction(2, 5))], PeriodGrid(H, 0), FactorialDigits())
    assert tr.target("a") is None
    assert tr.active() == []


def test_trim_general_digit_selects_period():
    # v = 4 contained periods, d_3 = 2 picks the third
    tr = trim_general([_req(0, 2)], PeriodGrid(H, 0), FactorialDigits((2, 0, 0)))
    assert tr.target("a") == (1, Fraction(3, 2))


@given(
    st.fractions(min_value=0, max_value=10, max_denominator=20),
    st.fractions(min_value=1, max_value=3, max_denominator=20),
    st.integers(0, 23),
)
def test_trim_general_target_contained(start, length, k):
    r = _req(start, length)
    g = PeriodGrid(Fraction(3, 4), Fraction(1, 4))
    t = trim_general([r], g, factorial_encode(k, 3)).target("a")
    if t is not None:
        assert r.window_start <= t[0] and t[1] <= r.window_end and t[1] - t[0] == g.period_length


# ---- factorial codec ----

def test_factorial_examples():
    assert factorial_encode(3, 2).digits == (1, 1)
    assert factorial_encode(6, 3).digits == (1, 0, 0)
    assert factorial_encode(0, 4).digits == (0, 0, 0, 0)
    with pytest.raises(ValueError):
        factorial_encode(24, 3)


def test_factorial_round_trip_exhaustive():
    seen = set()
    for k in range(math.factorial(7)):
        fd = factorial_encode(k, 6)
        assert factorial_decode(fd) == k
        assert all(fd.digit(i) <= i for i in range(1, 7))
        seen.add(fd.digits)
    assert len(seen) == math.factorial(7)


# ---- limited loss ----

def test_limited_loss_one_of_each():
    m = build_metric(1, TREE, [])
    reqs = [_req(Fraction(3, 10), rid="x"), _req(Fraction(3, 10), rid="y"), _req(Fraction(3, 10), rid="z")]
    tr = trim_unit(reqs)  # target [1/2, 1)
    run = ServiceRun((("x", Fraction(2, 5)), ("y", Fraction(3, 5)), ("z", Fraction(6, 5))))
    cands = limited_loss_candidates(run, tr)
    assert [len(c) for c in cands] == [1, 1, 1]
    for c in cands:
        assert verify_run(m, reqs, c, tr).feasible


def test_limited_loss_identity():
    tr = trim_unit([_req(Fraction(3, 10))])
    run = ServiceRun((("a", Fraction(3, 5)),))
    assert limited_loss_candidates(run, tr)[0] == run


@given(st.integers(0, 10**6))
def test_limited_loss_keeps_a_third(seed):
    m, reqs = random_instance(seed, requests=7)
    opt, run = brute_repairman(m, reqs)
    tr = trim_unit(reqs)
    cands = limited_loss_candidates(run, tr)
    for c in cands:
        assert verify_run(m, reqs, c, tr).feasible
    assert 3 * max(c.profit(reqs) for c in cands) >= opt


# ---- racing witness ----

def _optimal_tour(m, reqs):
    speed, order = brute_deliveryman(m, reqs)
    by_id = {r.id: r for r in reqs}
    items = [(by_id[i].node, by_id[i].window_start, by_id[i].window_end) for i in order]
    s = speed * (1 + Fraction(1, 10**9))
    times = earliest_schedule(m, items, s)
    return ServiceTour(ServiceRun(tuple(zip(order, times)), s))


def test_racing_factors():
    assert racing_factor(UNIT) == 4
    assert racing_factor(ONE_TO_TWO) == 6
    assert racing_factor(BOUNDED, 3) == 8


def test_racing_rejects_infeasible_base(path3):
    reqs = [ServiceRequest("a", 0, 0, 1), ServiceRequest("b", 2, 0, 1)]
    bad = ServiceRun((("a", 0), ("b", Fraction(1, 2))), Fraction(1))
    with pytest.raises(ValueError):
        racing_tour(path3, reqs, bad)


def test_racing_unit_pattern_positions():
    """Even block start sits at f(t - 1/2); 7/8 later it is back at f(t)."""
    m = build_metric(2, TREE, [(0, 1, 10)])
    reqs = [ServiceRequest("a", 0, 0, 1), ServiceRequest("b", 1, 5, 1)]
    base = ServiceRun((("a", 0), ("b", 5)), Fraction(2))
    w = racing_tour(m, reqs, base)
    for ti in (1, 2, 3):
        assert w.position(Fraction(ti)) == w.base_position(ti - H)
        assert w.position(ti + Fraction(7, 8)) == w.base_position(ti)


@pytest.mark.parametrize("cls, lo, hi", [(UNIT, 1, 1), (ONE_TO_TWO, 1, 2), (BOUNDED, 1, 3)])
def test_racing_witness_feasible(cls, lo, hi):
    for seed in range(15):
        m, reqs = random_instance(seed, requests=5, lo=lo, hi=hi)
        tour = _optimal_tour(m, reqs)
        w = racing_tour(m, reqs, tour, cls, 3 if cls == BOUNDED else None)
        assert w.speed == w.factor * tour.speed
        assert verify_run(m, reqs, w.as_tour(), w.trimmed).feasible
        # arc positions reachable along the base tour
        ev = sorted(w.schedule, key=lambda e: e[1])
        for (_, t0, a0), (_, t1, a1) in zip(ev, ev[1:]):
            assert abs(a1 - a0) <= w.speed * (t1 - t0)


def test_trim_earliest_picks_first_period():
    tr = trim_earliest([_req(Fraction(1, 10), Fraction(19, 10))])
    assert tr.target("a") == (H, 1)
