"""Exact-arithmetic foundation: metrics, requests, schedules and the verifier.

Every time, distance and speed is a :class:`fractions.Fraction`.  The only
non-rational value that ever appears is :data:`INF`, which compares above
every rational.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Hashable, Iterable, Mapping, Optional, Sequence, Union

INF = math.inf

Number = Union[int, Fraction]
RequestId = Hashable

TREE = "tree"
GRAPH = "graph"


def as_rational(x) -> Fraction:
    """Coerce ints, Fractions and decimal strings to an exact Fraction.

    Floats are rejected: they would silently carry binary rounding error.
    """
    if isinstance(x, bool) or isinstance(x, float):
        raise TypeError(f"refusing inexact value {x!r}")
    return Fraction(x)


class MetricError(ValueError):
    pass


@dataclass(frozen=True)
class MetricInstance:
    node_count: int
    kind: str
    edges: tuple
    dist: tuple = field(repr=False)

    def __post_init__(self):
        object.__setattr__(self, "_hash", hash((self.node_count, self.kind, self.edges)))

    def __hash__(self):
        return self._hash

    def d(self, u: int, v: int) -> Fraction:
        return self.dist[u][v]

    def neighbors(self):
        """Adjacency lists ``node -> [(other, weight), ...]`` sorted by node id."""
        adj = {u: [] for u in range(self.node_count)}
        for u, v, w in self.edges:
            adj[u].append((v, w))
            adj[v].append((u, w))
        for u in adj:
            adj[u].sort(key=lambda e: e[0])
        return adj

    @property
    def is_tree(self) -> bool:
        return self.kind == TREE


def build_metric(node_count: int, kind: str, edges: Iterable) -> MetricInstance:
    """Build the exact metric closure of a weighted undirected graph.

    ``kind="tree"`` additionally demands exactly ``node_count - 1`` edges
    forming a connected acyclic graph.
    """
    if node_count < 1:
        raise MetricError("node_count must be positive")
    if kind not in (TREE, GRAPH):
        raise MetricError(f"unknown metric kind {kind!r}")
    norm = []
    for u, v, w in edges:
        w = as_rational(w)
        if not (0 <= u < node_count and 0 <= v < node_count):
            raise MetricError(f"edge ({u}, {v}) references unknown node")
        if w <= 0:
            raise MetricError(f"edge ({u}, {v}) has non-positive weight {w}")
        if u == v:
            raise MetricError(f"self-loop at node {u}")
        norm.append((u, v, w))

    if kind == TREE and len(norm) != node_count - 1:
        raise MetricError(
            f"tree on {node_count} nodes needs {node_count - 1} edges, got {len(norm)}"
        )

    n = node_count
    d = [[INF] * n for _ in range(n)]
    for i in range(n):
        d[i][i] = Fraction(0)
    for u, v, w in norm:
        if w < d[u][v]:
            d[u][v] = d[v][u] = w
    # Floyd-Warshall over exact rationals
    for k in range(n):
        dk = d[k]
        for i in range(n):
            dik = d[i][k]
            if dik == INF:
                continue
            di = d[i]
            for j in range(n):
                alt = dik + dk[j]
                if alt < di[j]:
                    di[j] = alt
    for i in range(n):
        if any(x == INF for x in d[i]):
            raise MetricError("input graph is disconnected")
    # connected with n-1 edges => acyclic
    return MetricInstance(n, kind, tuple(norm), tuple(tuple(row) for row in d))


def metric_from_table(table: Sequence[Sequence]) -> MetricInstance:
    """Wrap an existing distance table as a graph metric (closure re-applied)."""
    n = len(table)
    edges = [(i, j, table[i][j]) for i in range(n) for j in range(i + 1, n) if table[i][j] > 0]
    return build_metric(n, GRAPH, edges)


@dataclass(frozen=True)
class ServiceRequest:
    id: RequestId
    node: int
    window_start: Fraction
    window_length: Fraction
    profit: int = 1

    def __post_init__(self):
        object.__setattr__(self, "window_start", as_rational(self.window_start))
        object.__setattr__(self, "window_length", as_rational(self.window_length))
        if self.window_length <= 0:
            raise ValueError(f"request {self.id!r}: window length must be positive")
        if int(self.profit) != self.profit or self.profit < 1:
            raise ValueError(f"request {self.id!r}: profit must be a positive integer")

    @property
    def window_end(self) -> Fraction:
        return self.window_start + self.window_length

    @property
    def window(self) -> tuple:
        return (self.window_start, self.window_end)

    def contains(self, t) -> bool:
        return self.window_start <= t < self.window_end


@dataclass(frozen=True)
class ServiceRun:
    """Ordered ``(request id, service time)`` events travelled at ``speed``."""

    events: tuple = ()
    speed: Fraction = Fraction(1)

    def __post_init__(self):
        object.__setattr__(self, "events", tuple((rid, as_rational(t)) for rid, t in self.events))
        object.__setattr__(self, "speed", as_rational(self.speed))
        if self.speed < 0:
            raise ValueError("speed must be nonnegative")

    def __len__(self):
        return len(self.events)

    @property
    def request_ids(self) -> tuple:
        return tuple(rid for rid, _ in self.events)

    def profit(self, requests) -> int:
        by_id = request_index(requests)
        return sum(by_id[rid].profit for rid in set(self.request_ids))

    def shifted(self, delta) -> "ServiceRun":
        return ServiceRun(tuple((rid, t + delta) for rid, t in self.events), self.speed)

    def restricted(self, keep) -> "ServiceRun":
        keep = set(keep)
        return ServiceRun(tuple(e for e in self.events if e[0] in keep), self.speed)


@dataclass(frozen=True)
class ServiceTour:
    run: ServiceRun
    covers_all: bool = True

    @property
    def speed(self) -> Fraction:
        return self.run.speed

    @property
    def events(self) -> tuple:
        return self.run.events


WINDOW_MISS = "window_miss"
TRAVEL_TOO_FAST = "travel_too_fast"
ORDER_VIOLATION = "order_violation"
MISSING_REQUEST = "missing_request"


@dataclass(frozen=True)
class Violation:
    kind: str
    request: RequestId
    detail: str


@dataclass(frozen=True)
class VerifyReport:
    violations: tuple = ()

    @property
    def feasible(self) -> bool:
        return not self.violations

    def __bool__(self):
        return self.feasible

    def kinds(self) -> set:
        return {v.kind for v in self.violations}


def request_index(requests) -> dict:
    if isinstance(requests, Mapping):
        return dict(requests)
    out = {}
    for r in requests:
        if r.id in out:
            raise ValueError(f"duplicate request id {r.id!r}")
        out[r.id] = r
    return out


def travel_time(dist: Fraction, speed: Fraction):
    if dist == 0:
        return Fraction(0)
    if speed == 0:
        return INF
    return dist / speed


def verify_run(instance: MetricInstance, requests, run, trimmed=None) -> VerifyReport:
    """Check a run (or tour) against windows and travel times, exactly.

    ``trimmed`` is either ``None`` (use the request windows), a mapping
    ``request id -> (lo, hi) | None`` or anything with a ``windows()`` method
    returning such a mapping.  ``None`` in the mapping means the request was
    excluded by trimming and may not be serviced.
    """
    by_id = request_index(requests)
    tour = isinstance(run, ServiceTour)
    base = run.run if tour else run
    if trimmed is not None and hasattr(trimmed, "windows"):
        trimmed = trimmed.windows()

    out = []
    seen = set()
    prev = None
    for rid, t in base.events:
        if rid not in by_id:
            raise KeyError(f"unknown request id {rid!r}")
        req = by_id[rid]
        if rid in seen:
            out.append(Violation(ORDER_VIOLATION, rid, "request serviced twice"))
        seen.add(rid)

        if trimmed is None:
            lo, hi = req.window
        else:
            win = trimmed.get(rid)
            lo, hi = win if win is not None else (None, None)
        if lo is None:
            out.append(Violation(WINDOW_MISS, rid, "request excluded by trimming"))
        elif not (lo <= t < hi):
            out.append(Violation(WINDOW_MISS, rid, f"time {t} outside [{lo}, {hi})"))

        if prev is not None:
            prid, pt = prev
            if t < pt:
                out.append(Violation(ORDER_VIOLATION, rid, f"time {t} before previous {pt}"))
            else:
                dist = instance.d(by_id[prid].node, req.node)
                if (t - pt) * base.speed < dist:
                    out.append(
                        Violation(
                            TRAVEL_TOO_FAST,
                            rid,
                            f"needs {travel_time(dist, base.speed)} from {prid!r}, has {t - pt}",
                        )
                    )
        prev = (rid, t)

    if tour:
        for rid in by_id:
            if rid not in seen:
                out.append(Violation(MISSING_REQUEST, rid, "tour does not service request"))
    return VerifyReport(tuple(out))


def fixed_order_min_speed(instance: MetricInstance, items: Sequence) -> Fraction:
    """Infimum speed for visiting ``items`` in the given order.

    ``items`` holds ``(node, release, deadline_sup)`` triples, each demanding a
    service time in ``[release, deadline_sup)``.  The value is
    ``max_{k<=l} C(k,l) / (d_l - r_k)`` with ``C`` the cumulative distance along
    the order.  Every strictly larger speed is feasible; the infimum itself
    is not attained when positive.  Returns ``INF`` when no speed works.
    """
    n = len(items)
    cum = [Fraction(0)] * n
    for i in range(1, n):
        cum[i] = cum[i - 1] + instance.d(items[i - 1][0], items[i][0])
    best = Fraction(0)
    for l in range(n):
        dl = items[l][2]
        for k in range(l + 1):
            rk = items[k][1]
            c = cum[l] - cum[k]
            span = dl - rk
            if span <= 0:
                return INF
            if c > 0:
                ratio = c / span
                if ratio > best:
                    best = ratio
    return best


def earliest_schedule(instance: MetricInstance, items: Sequence, speed) -> Optional[list]:
    """Earliest-service times for a fixed order with waiting, or ``None``."""
    times = []
    prev_node = None
    t = None
    for node, release, deadline in items:
        if t is None:
            t = release
        else:
            t = max(release, t + travel_time(instance.d(prev_node, node), speed))
        if t == INF or t >= deadline:
            return None
        times.append(t)
        prev_node = node
    return times


def service_time_transform(instance: MetricInstance, requests, model: str, mu) -> tuple:
    """Absorb nonzero service times into the metric by pendant nodes.

    ``model="contained"``: uniform ``mu`` in ``[0, 1)``; each request moves to a
    fresh leaf at distance ``mu/2`` with window shrunk by ``mu/2`` on both sides.
    ``model="start_only"``: ``mu`` may be a mapping ``request id -> mu_r``; the
    window is shifted right by ``mu_r/2``.  Zero service times leave the
    request untouched (a zero-weight edge is not a valid metric edge).
    """
    if model not in ("contained", "start_only"):
        raise ValueError(f"unknown service-time model {model!r}")
    if model == "contained":
        mu = as_rational(mu)
        if not 0 <= mu < 1:
            raise ValueError("contained model needs 0 <= mu < 1")

    edges = list(instance.edges)
    n = instance.node_count
    out = []
    for r in requests:
        m = as_rational(mu[r.id] if isinstance(mu, Mapping) else mu)
        if m < 0:
            raise ValueError("service time must be nonnegative")
        if m == 0:
            out.append(r)
            continue
        half = m / 2
        edges.append((r.node, n, half))
        if model == "contained":
            start, length = r.window_start + half, r.window_length - m
        else:
            start, length = r.window_start + half, r.window_length
        out.append(ServiceRequest(r.id, n, start, length, r.profit))
        n += 1
    if n == instance.node_count:
        return instance, tuple(out)
    return build_metric(n, instance.kind, edges), tuple(out)
