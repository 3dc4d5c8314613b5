import math
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from twr.core import GRAPH, ServiceRequest, build_metric, TREE, verify_run
from twr.multiwindow import (
    RHO,
    WINDOW12_PLAN,
    bounded_factor,
    class_count,
    delivery_bounded,
    evaluate_bound12,
    length_class,
    partition_by_length,
    scale_instance,
    scale_run,
    window12,
    window12_search,
    windowg_plan,
    windowg_search,
    windowgd_search,
)
from twr.oracle import brute_deliveryman, brute_repairman
from twr.trimming import trim_earliest

from conftest import random_instance

CORNERS = [tuple(Fraction(int(i == j)) for j in range(5)) for i in range(5)]


def _expected_calls(p, g):
    return sum((i + 2**g) * math.factorial(p + g - i) for i in range(p + 1))


def test_window12_plan_table():
    assert windowg_plan(2, 1).summary() == WINDOW12_PLAN


@pytest.mark.parametrize("p, g, calls", [(1, 1, 7), (2, 1, 22), (3, 1, 79)])
def test_plan_call_counts(p, g, calls):
    assert windowg_plan(p, g).call_count == calls == _expected_calls(p, g)


def test_plan_rejects_bad_parameters():
    with pytest.raises(ValueError):
        windowg_plan(0, 1)
    with pytest.raises(ValueError):
        windowg_plan(1, 0)


def test_window12_single_request():
    m = build_metric(1, TREE, [])
    reqs = [ServiceRequest("a", 0, Fraction(3, 10), Fraction(14, 10))]
    res = window12_search(m, reqs)
    assert res.profit == 1 and res.calls == 22


def test_window12_rejects_long_window():
    m = build_metric(1, TREE, [])
    with pytest.raises(ValueError):
        window12(m, [ServiceRequest("a", 0, 0, 2)])


def test_windowg_excludes_per_grid_only():
    # a length-1 window fits no length-1 period on the quarter-offset grids
    m = build_metric(1, TREE, [])
    reqs = [ServiceRequest("a", 0, Fraction(1, 8), 1)]
    res = windowg_search(m, reqs, 1, 1)
    assert res.profit == 1 and res.calls == 7


@given(st.integers(0, 10**6))
def test_window12_bound(seed):
    m, reqs = random_instance(seed, requests=6, lo=1, hi=2, max_weight=2)
    opt, _ = brute_repairman(m, reqs)
    res = window12_search(m, reqs)
    assert verify_run(m, reqs, res.run).feasible
    assert 219 * res.profit >= 52 * opt


# ---- bound evaluator ----

def test_bound_at_corners():
    assert [evaluate_bound12(h) for h in CORNERS] == [Fraction(52, 219)] * 5


def test_bound_uniform_point():
    assert evaluate_bound12([Fraction(1, 5)] * 5) == Fraction(52, 219)


@given(st.lists(st.integers(0, 50), min_size=5, max_size=5).filter(any))
def test_bound_minimum_on_simplex(ws):
    h = [Fraction(w, sum(ws)) for w in ws]
    assert evaluate_bound12(h) >= Fraction(52, 219)


def test_bound_rejects_off_simplex():
    with pytest.raises(ValueError):
        evaluate_bound12((1, 1, 0, 0, 0))


def test_rho_table():
    assert RHO[2] == Fraction(52, 219)


# ---- length classes ----

def test_class_counts():
    assert class_count(4, 2) == 2
    assert class_count(Fraction(3, 2), 2) == 1
    assert length_class(1, 2) == 0 and length_class(3, 2) == 1 and length_class(4, 2) == 2


@given(st.lists(st.fractions(min_value=1, max_value=20, max_denominator=10), min_size=1, max_size=12))
def test_partition_covers_once(lengths):
    reqs = [ServiceRequest(f"r{i}", 0, 0, L) for i, L in enumerate(lengths)]
    parts = partition_by_length(reqs, Fraction(2))
    ids = [r.id for grp in parts.values() for r in grp]
    assert sorted(ids) == sorted(r.id for r in reqs)
    for k, grp in parts.items():
        assert all(2**k <= r.window_length < 2 ** (k + 1) for r in grp)


@given(st.integers(0, 10**6), st.integers(0, 3))
def test_rescaling_round_trip(seed, r):
    m, reqs = random_instance(seed, kind=GRAPH, requests=4, hi=3)
    c = Fraction(3, 2) ** r
    m2, reqs2 = scale_instance(*scale_instance(m, reqs, 1 / c), c)
    assert m2 == m and reqs2 == reqs
    _, run = brute_repairman(*scale_instance(m, reqs, 1 / c))
    assert verify_run(m, reqs, scale_run(run, c)).feasible


def test_windowgd_mixed_lengths():
    m = build_metric(2, TREE, [(0, 1, 1)])
    reqs = [ServiceRequest("a", 0, 0, 1), ServiceRequest("b", 1, 0, 3), ServiceRequest("c", 0, 5, 3)]
    res = windowgd_search(m, reqs, 2, 1)  # b = 2
    assert set(res.per_class) == {0, 1}
    assert verify_run(m, reqs, res.run).feasible
    assert res.profit == max(res.per_class.values())


def test_windowgd_single_class_is_windowg():
    m, reqs = random_instance(5, requests=5, lo=1, hi=Fraction(3, 2))
    assert windowgd_search(m, reqs, 1, 1).profit == windowg_search(m, reqs, 1, 1).profit


# ---- bounded deliveryman ----

def test_bounded_factors():
    assert bounded_factor(1) == 4 and bounded_factor(3) == 8


@pytest.mark.parametrize("kind, hi", [(TREE, 1), (TREE, 2), (GRAPH, 2), (TREE, 3), (GRAPH, 3)])
def test_delivery_bounded_ratio(kind, hi):
    eps = Fraction(1, 20)
    for seed in range(12):
        m, reqs = random_instance(seed, kind=kind, requests=5, hi=hi)
        tour = delivery_bounded(m, reqs, eps)
        assert verify_run(m, reqs, tour, trim_earliest(reqs)).feasible
        opt, _ = brute_deliveryman(m, reqs)
        D = max(math.ceil(r.window_length) for r in reqs)
        delta = 1 + eps if kind == TREE else 2
        assert tour.speed <= bounded_factor(D) * delta * opt * (1 + Fraction(1, 10**9))


def test_delivery_bounded_rejects_short():
    m = build_metric(1, TREE, [])
    with pytest.raises(ValueError):
        delivery_bounded(m, [ServiceRequest("a", 0, 0, Fraction(1, 2))])
