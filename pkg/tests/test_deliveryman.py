import itertools
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from twr._trees import walk_length
from twr.core import GRAPH, INF, TREE, ServiceRequest, build_metric, earliest_schedule, fixed_order_min_speed, verify_run
from twr.deliveryman import delivery_graph, delivery_tree, mst_chain, single_period_tree_length, test_speed as speed_test
from twr.oracle import brute_deliveryman
from twr.trimming import PeriodGrid, TrimmedInstance, trim_unit

from conftest import random_instance

H = Fraction(1, 2)
SLACK = 1 + Fraction(1, 10**9)


def _trimmed(reqs, periods):
    """Trim each request to the given half-period index."""
    return TrimmedInstance(tuple(reqs), PeriodGrid(H, 0), dict(zip((r.id for r in reqs), periods)))


# ---- single-period walk length ----

def test_walk_length_examples(path3):
    assert single_period_tree_length(path3, {0, 1, 2}, 0, 2) == 3
    assert single_period_tree_length(path3, {0, 2}, 0, 0) == 6
    star = build_metric(3, TREE, [(0, 1, 1), (0, 2, 2)])
    assert single_period_tree_length(star, {2}, 0, 1) == 5


def _shortest_walk(m, nodes, u, v):
    """Shortest node sequence of length <= 2n from u to v covering nodes."""
    n = m.node_count
    best = INF
    for L in range(0, 2 * n):
        for mid in itertools.product(range(n), repeat=L):
            seq = (u,) + mid + (v,)
            if set(nodes) <= set(seq):
                best = min(best, walk_length(m, seq))
        if best < INF and L >= n:
            break
    return best


@given(st.integers(0, 10**6))
def test_walk_length_matches_enumeration(seed):
    m, reqs = random_instance(seed, nodes=4, requests=3)
    nodes = {r.node for r in reqs}
    u, v = reqs[0].node, reqs[-1].node
    assert single_period_tree_length(m, nodes, u, v) == _shortest_walk(m, nodes, u, v)


# ---- speed test ----

def test_speed_single_request():
    m = build_metric(1, TREE, [])
    reqs = [ServiceRequest("a", 0, 0, 1)]
    ok, tour = speed_test(m, trim_unit(reqs), Fraction(1, 100))
    assert ok and verify_run(m, reqs, tour).feasible


def test_speed_adjacent_periods():
    m = build_metric(2, TREE, [(0, 1, 3)])
    reqs = [ServiceRequest("a", 0, 0, 1), ServiceRequest("b", 1, H, 1)]
    tr = _trimmed(reqs, [0, 1])
    assert not speed_test(m, tr, 2)[0]
    ok, tour = speed_test(m, tr, 7)
    assert ok and verify_run(m, reqs, tour, tr).feasible
    items = [(0, 0, H), (1, H, 1)]
    assert fixed_order_min_speed(m, items) == 3
    assert not speed_test(m, tr, 3)[0]
    assert speed_test(m, tr, 3 + Fraction(1, 10**6))[0]


def test_speed_colocated():
    m = build_metric(2, TREE, [(0, 1, 5)])
    reqs = [ServiceRequest(f"r{i}", 1, i, 1) for i in range(4)]
    assert speed_test(m, trim_unit(reqs), Fraction(1, 1000))[0]


@given(st.integers(0, 10**6), st.fractions(min_value=0, max_value=20, max_denominator=8))
def test_speed_monotone(seed, s):
    m, reqs = random_instance(seed, requests=6)
    tr = trim_unit(reqs)
    if speed_test(m, tr, s)[0]:
        assert speed_test(m, tr, s + Fraction(1, 7))[0]


@given(st.integers(0, 10**6))
def test_speed_threshold_is_oracle_infimum(seed):
    m, reqs = random_instance(seed, requests=6)
    tr = trim_unit(reqs)
    opt, _ = brute_deliveryman(m, reqs, tr)
    if opt == 0:
        return
    assert not speed_test(m, tr, opt)[0]
    ok, tour = speed_test(m, tr, opt * (1 + Fraction(1, 1000)))
    assert ok and verify_run(m, reqs, tour, tr).feasible


# ---- tree search ----

def test_delivery_tree_same_period():
    m = build_metric(2, TREE, [(0, 1, 3)])
    reqs = [ServiceRequest("a", 0, 0, 1), ServiceRequest("b", 1, 0, 1)]
    tr = _trimmed(reqs, [0, 0])
    eps = Fraction(1, 20)
    tour = delivery_tree(m, tr, eps)
    assert 6 < tour.speed <= 6 * (1 + eps / 4)
    assert verify_run(m, reqs, tour, tr).feasible


def test_delivery_tree_single_request():
    m = build_metric(1, TREE, [])
    reqs = [ServiceRequest("a", 0, 0, 1)]
    tour = delivery_tree(m, trim_unit(reqs), Fraction(1, 10))
    assert tour.speed == 0 and verify_run(m, reqs, tour).feasible


def test_delivery_tree_rejects_bad_input(unit_triangle):
    reqs = [ServiceRequest("a", 0, 0, 1)]
    with pytest.raises(ValueError):
        delivery_tree(unit_triangle, trim_unit(reqs), Fraction(1, 10))
    with pytest.raises(ValueError):
        delivery_tree(build_metric(1, TREE, []), trim_unit(reqs), 0)


@given(st.integers(0, 10**6))
def test_delivery_tree_near_trimmed_optimum(seed):
    m, reqs = random_instance(seed, requests=6)
    tr = trim_unit(reqs)
    eps = Fraction(1, 20)
    opt, _ = brute_deliveryman(m, reqs, tr)
    tour = delivery_tree(m, tr, eps)
    assert verify_run(m, reqs, tour, tr).feasible
    assert tour.speed <= (1 + eps / 4) * opt * SLACK


# ---- MST chain ----

def test_chain_single_period_speed():
    m = build_metric(2, TREE, [(0, 1, Fraction(3, 2))])
    reqs = [ServiceRequest("a", 0, 0, 1), ServiceRequest("b", 1, 0, 1)]
    ch = mst_chain(m, _trimmed(reqs, [0, 0]))
    assert ch.walk_lengths == (Fraction(3, 2),)
    assert ch.min_speed == 3  # walk 3/2 over half a unit


def test_chain_contiguous_periods():
    m = build_metric(3, TREE, [(0, 1, 2), (1, 2, 3)])
    reqs = [ServiceRequest("a", 0, 0, 1), ServiceRequest("b", 1, 0, 1), ServiceRequest("c", 2, H, 1)]
    ch = mst_chain(m, _trimmed(reqs, [0, 0, 1]))
    assert ch.cost(0, 1) == 5
    assert ch.min_speed == 5  # 2 * 5 / 2


def test_chain_gap_aware_denominator():
    m = build_metric(3, TREE, [(0, 1, 2), (1, 2, 3)])
    reqs = [ServiceRequest("a", 0, 0, 1), ServiceRequest("b", 1, 0, 1), ServiceRequest("c", 2, 10, 1)]
    tr = _trimmed(reqs, [0, 0, 20])
    ch = mst_chain(m, tr)
    assert ch.cost(0, 1) == 5
    assert ch.min_speed == 4  # the first period alone: 2 / (1/2)
    tour = delivery_graph(m, tr)
    assert verify_run(m, reqs, tour, tr).feasible


@given(st.integers(0, 10**6), st.sampled_from([TREE, GRAPH]))
def test_chain_closed_form_equals_fixed_order(seed, kind):
    m, reqs = random_instance(seed, kind=kind, requests=6)
    tr = trim_unit(reqs)
    ch = mst_chain(m, tr)
    assert ch.min_speed == fixed_order_min_speed(m, ch.waypoints())
    tour = delivery_graph(m, tr)
    assert verify_run(m, reqs, tour, tr).feasible


@given(st.integers(0, 10**6), st.sampled_from([TREE, GRAPH]))
def test_chain_within_twice_trimmed_optimum(seed, kind):
    m, reqs = random_instance(seed, kind=kind, requests=6)
    tr = trim_unit(reqs)
    opt, _ = brute_deliveryman(m, reqs, tr)
    assert mst_chain(m, tr).min_speed <= 2 * opt


@given(st.integers(0, 10**6), st.sampled_from([TREE, GRAPH]))
def test_chain_reaches_entries_in_time(seed, kind):
    """At twice the optimal speed the chain reaches each u_i before the
    optimal trimmed tour makes its first service in that period."""
    m, reqs = random_instance(seed, kind=kind, requests=6)
    tr = trim_unit(reqs)
    opt, order = brute_deliveryman(m, reqs, tr)
    if opt == 0:
        return
    eta = opt * SLACK
    by_id = {r.id: r for r in reqs}
    wins = tr.windows()
    opt_times = earliest_schedule(m, [(by_id[i].node, *wins[i]) for i in order], eta)
    first = {}
    for rid, t in zip(order, opt_times):
        p = tr.assignment[rid]
        first[p] = min(first.get(p, t), t)
    ch = mst_chain(m, tr)
    chain_times = earliest_schedule(m, ch.waypoints(), 2 * eta)
    k = 0
    for (p, _, _), walk in zip(ch.periods, ch.walks):
        assert chain_times[k] <= first[p]
        k += len(walk)
