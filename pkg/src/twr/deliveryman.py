"""Speed-minimizing solvers on trimmed windows.

``test_speed`` is the forward feasibility program over periods; it drives a
binary search bracketed by the MST-chain tour of ``delivery_graph``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from . import _trees
from .core import (
    INF,
    TREE,
    ServiceRun,
    ServiceTour,
    build_metric,
    earliest_schedule,
    travel_time,
)
from .repairman import ExactPathSolver

_HAMILTON = ExactPathSolver()


def single_period_tree_length(tree, nodes, u, v) -> Fraction:
    """Shortest ``u``-``v`` walk through ``nodes`` on a tree: ``2 W - d(u, v)``."""
    return 2 * _trees.steiner_weight(tree, set(nodes) | {u, v}) - tree.d(u, v)


def _period_walk(instance, nodes, u, v):
    """Shortest walk from ``u`` to ``v`` covering ``nodes`` (node list)."""
    if instance.is_tree:
        return _trees.tree_walk(instance, nodes, u, v)
    res = _HAMILTON.solve(instance, {x: 1 for x in nodes}, u, v, len(set(nodes) | {u, v}))
    return list(res.path)


def _serve(requests_at, walk, start_time, speed, metric):
    """Service events along ``walk`` starting at ``start_time``; each node at first visit."""
    events = []
    done = set()
    for x, arc in sorted(_trees.first_visits(metric, walk).items(), key=lambda e: (e[1], e[0])):
        if x in done:
            continue
        done.add(x)
        t = start_time + travel_time(arc, speed)
        for rid in requests_at.get(x, ()):
            events.append((rid, t))
    return events


def _period_data(trimmed):
    out = []
    for i, reqs in trimmed.periods().items():
        at = {}
        for r in sorted(reqs, key=lambda r: str(r.id)):
            at.setdefault(r.node, []).append(r.id)
        out.append((i, trimmed.grid.interval(i), sorted(at), at))
    return out


def test_speed(instance, trimmed, speed):
    """Decide whether ``speed`` suffices for a tour of all trimmed requests.

    Returns ``(True, tour)`` with a tour the verifier accepts, or
    ``(False, None)``.
    """
    speed = Fraction(speed)
    periods = _period_data(trimmed)
    if not periods:
        return True, ServiceTour(ServiceRun((), speed), True)

    walks = {}
    back = []  # per period: (arrival map, departure map)
    _, (b0, _), nodes0, _ = periods[0]
    A = {u: (b0, None) for u in nodes0}
    for idx, (i, (begin, end), nodes, _) in enumerate(periods):
        Dep = {}
        for v in nodes:
            best = (INF, None)
            for u in nodes:
                if A[u][0] == INF:
                    continue
                key = (i, u, v)
                if key not in walks:
                    walks[key] = _period_walk(instance, nodes, u, v)
                t = A[u][0] + travel_time(_trees.walk_length(instance, walks[key]), speed)
                if t < best[0]:
                    best = (t, u)
            Dep[v] = best if best[0] < end else (INF, None)
        back.append((A, Dep))
        if idx + 1 == len(periods):
            break
        _, (nb, ne), nnodes, _ = periods[idx + 1]
        A = {}
        for w in nnodes:
            best = (INF, None)
            for v in nodes:
                if Dep[v][0] == INF:
                    continue
                t = Dep[v][0] + travel_time(instance.d(v, w), speed)
                if t < best[0]:
                    best = (t, v)
            arrive = max(nb, best[0]) if best[0] != INF else INF
            A[w] = (arrive, best[1]) if arrive < ne else (INF, None)

    A, Dep = back[-1]
    finite = [(t, v) for v, (t, _) in Dep.items() if t != INF]
    if not finite:
        return False, None

    # walk the back pointers from the earliest final departure
    _, v = min(finite)
    legs = []
    for idx in range(len(periods) - 1, -1, -1):
        A, Dep = back[idx]
        u = Dep[v][1]
        legs.append((idx, u, v))
        if idx:
            v = A[u][1]
    legs.reverse()
    events = []
    for idx, u, v in legs:
        i, _, _, at = periods[idx]
        A, _ = back[idx]
        events += _serve(at, walks[(i, u, v)], A[u][0], speed, instance)
    return True, ServiceTour(ServiceRun(tuple(events), speed), True)


def _prim(instance, nodes):
    nodes = sorted(nodes)
    if len(nodes) <= 1:
        return []
    inside = {nodes[0]}
    edges = []
    while len(inside) < len(nodes):
        best = None
        for a in sorted(inside):
            for b in nodes:
                if b in inside:
                    continue
                cand = (instance.d(a, b), a, b)
                if best is None or cand < best:
                    best = cand
        edges.append((best[1], best[2], best[0]))
        inside.add(best[2])
    return edges


class _LocalTree:
    """An MST over a node subset, addressable with the original node ids."""

    def __init__(self, instance, nodes, edges):
        self.nodes = sorted(nodes)
        self.index = {x: k for k, x in enumerate(self.nodes)}
        local = [(self.index[a], self.index[b], w) for a, b, w in edges]
        self.tree = build_metric(len(self.nodes), TREE, local)

    def dist(self, a, b):
        return self.tree.d(self.index[a], self.index[b])

    def walk(self, u, v):
        w = _trees.tree_walk(self.tree, range(len(self.nodes)), self.index[u], self.index[v])
        return [self.nodes[k] for k in w]


@dataclass(frozen=True)
class TourChain:
    """Per-period MST walks joined by shortest connecting edges."""

    periods: tuple  # (period index, begin, end)
    mst_edges: tuple
    entries: tuple  # u_i
    exits: tuple  # v_i
    walks: tuple  # node lists, walks[i] from u_i to v_i
    offsets: tuple  # tour arc position of u_i
    walk_lengths: tuple
    min_speed: Fraction  # infimum speed for this fixed tour

    def waypoints(self) -> list:
        """Every walk vertex with its period as the allowed interval."""
        out = []
        for (_, b, e), walk in zip(self.periods, self.walks):
            out += [(x, b, e) for x in walk]
        return out

    def cost(self, i, j) -> Fraction:
        """Tour length from ``u_i`` to ``v_j`` (0-based)."""
        return self.offsets[j] + self.walk_lengths[j] - self.offsets[i]


def mst_chain(instance, trimmed) -> TourChain:
    periods = _period_data(trimmed)
    m = len(periods)
    if m == 0:
        return TourChain((), (), (), (), (), (), (), Fraction(0))
    nodesets = [p[2] for p in periods]
    msts = [_prim(instance, ns) for ns in nodesets]
    trees = [_LocalTree(instance, ns, e) for ns, e in zip(nodesets, msts)]

    entries = [None] * m
    exits = [None] * m
    for i in range(m - 1):
        best = min((instance.d(a, b), a, b) for a in nodesets[i] for b in nodesets[i + 1])
        exits[i], entries[i + 1] = best[1], best[2]
    if m == 1:
        ns = nodesets[0]
        _, u, v = max(((trees[0].dist(a, b), -a, -b) for a in ns for b in ns))
        entries[0], exits[0] = -u, -v
    else:
        entries[0] = max(nodesets[0], key=lambda a: (trees[0].dist(a, exits[0]), -a))
        exits[-1] = max(nodesets[-1], key=lambda b: (trees[-1].dist(entries[-1], b), -b))

    walks = [t.walk(u, v) for t, u, v in zip(trees, entries, exits)]
    lengths = [_trees.walk_length(instance, w) for w in walks]
    offsets = [Fraction(0)]
    for i in range(1, m):
        offsets.append(offsets[-1] + lengths[i - 1] + instance.d(exits[i - 1], entries[i]))

    spans = [(b, e) for _, (b, e), _, _ in periods]
    best = Fraction(0)
    for i in range(m):
        for j in range(i, m):
            c = offsets[j] + lengths[j] - offsets[i]
            if c > 0:
                best = max(best, c / (spans[j][1] - spans[i][0]))
    return TourChain(
        tuple((p[0], p[1][0], p[1][1]) for p in periods),
        tuple(tuple(e) for e in msts),
        tuple(entries),
        tuple(exits),
        tuple(tuple(w) for w in walks),
        tuple(offsets),
        tuple(lengths),
        best,
    )


DEFAULT_MARGIN = Fraction(1, 10**12)


def delivery_graph(instance, trimmed, margin=DEFAULT_MARGIN) -> ServiceTour:
    """MST-chain tour driven just above its infimum speed.

    The infimum (``mst_chain(...).min_speed``) is not attained with half-open
    windows, so the returned tour runs at ``min_speed * (1 + margin)``.
    """
    chain = mst_chain(instance, trimmed)
    speed = chain.min_speed * (1 + margin)
    points = chain.waypoints()
    times = earliest_schedule(instance, points, speed)
    if times is None:
        raise AssertionError("MST chain infeasible above its infimum speed")
    at_by_period = [p[3] for p in _period_data(trimmed)]
    events = []
    k = 0
    for walk, at in zip(chain.walks, at_by_period):
        done = set()
        for x in walk:
            if x not in done:
                done.add(x)
                events += [(rid, times[k]) for rid in at.get(x, ())]
            k += 1
    return ServiceTour(ServiceRun(tuple(events), speed), True)


def delivery_tree(instance, trimmed, epsilon) -> ServiceTour:
    """Binary search on ``test_speed`` inside the MST-chain bracket.

    With ``e' = epsilon / 4`` the search stops once the feasible end is within
    a factor ``1 + e'`` of the infeasible end, so the returned speed is at
    most ``(1 + e')`` times the trimmed optimum.
    """
    epsilon = Fraction(epsilon)
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    if not instance.is_tree:
        raise ValueError("delivery_tree needs a tree metric")
    eps = epsilon / 4
    s_g = mst_chain(instance, trimmed).min_speed
    if s_g == 0:
        ok, tour = test_speed(instance, trimmed, 0)
        assert ok
        return tour
    hi = s_g * (1 + eps)
    ok, tour = test_speed(instance, trimmed, hi)
    assert ok, "MST-chain bracket must be feasible"
    lo = s_g / 2
    ok, low_tour = test_speed(instance, trimmed, lo)
    while ok:
        # bracket bottom unexpectedly feasible; keep halving
        hi, tour = lo, low_tour
        lo = lo / 2
        ok, low_tour = test_speed(instance, trimmed, lo)
    rounds = math.ceil(math.log2((hi - lo) / (eps * lo))) if hi > (1 + eps) * lo else 0
    for _ in range(max(rounds, 0)):
        mid = (lo + hi) / 2
        ok, cand = test_speed(instance, trimmed, mid)
        if ok:
            hi, tour = mid, cand
        else:
            lo = mid
    return tour
