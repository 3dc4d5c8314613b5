"""Seeded random instances and the partition-reduction instance."""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

from .core import GRAPH, TREE, ServiceRequest, as_rational, build_metric

# denominators for random edge weights and window placement
WEIGHT_DENOMINATORS = (1, 2, 4, 8)
TIME_GRAIN = 20


@dataclass(frozen=True)
class RandomParams:
    node_count: int = 6
    kind: str = TREE
    request_count: int = 6
    length_lo: Fraction = Fraction(1)
    length_hi: Fraction = Fraction(1)
    horizon: Fraction = Fraction(3)
    max_weight: int = 8

    def validate(self):
        if self.node_count < 1:
            raise ValueError("node_count must be positive")
        if self.request_count < 0:
            raise ValueError("request_count must be nonnegative")
        if self.kind not in (TREE, GRAPH):
            raise ValueError(f"unknown kind {self.kind!r}")
        if as_rational(self.length_lo) < 1 or as_rational(self.length_hi) < as_rational(self.length_lo):
            raise ValueError("window length range must satisfy 1 <= lo <= hi")
        if as_rational(self.horizon) <= 0 or self.max_weight < 1:
            raise ValueError("horizon and max_weight must be positive")


def _rand_weight(rng, max_weight):
    den = rng.choice(WEIGHT_DENOMINATORS)
    return Fraction(rng.randint(1, max_weight), den)


def generate_random(seed: int, params: RandomParams = RandomParams()):
    """Deterministic random ``(metric, requests)`` for a seed.

    Window lengths are drawn from ``[lo, hi)`` on a ``1/20`` grid (exactly
    ``lo`` when ``lo == hi``); window starts from ``[0, horizon)``.
    """
    params.validate()
    rng = random.Random(seed)
    n = params.node_count
    edges = []
    present = set()
    for v in range(1, n):
        u = rng.randrange(v)
        edges.append((u, v, _rand_weight(rng, params.max_weight)))
        present.add((u, v))
    if params.kind == GRAPH and n > 2:
        for _ in range(rng.randint(0, n)):
            u, v = sorted(rng.sample(range(n), 2))
            if (u, v) not in present:
                present.add((u, v))
                edges.append((u, v, _rand_weight(rng, params.max_weight)))
    metric = build_metric(n, params.kind, edges)

    lo, hi = as_rational(params.length_lo), as_rational(params.length_hi)
    steps = int((hi - lo) * TIME_GRAIN)
    horizon_steps = int(as_rational(params.horizon) * TIME_GRAIN)
    requests = []
    for i in range(params.request_count):
        node = rng.randrange(n)
        start = Fraction(rng.randrange(horizon_steps), TIME_GRAIN)
        length = lo + (Fraction(rng.randrange(steps), TIME_GRAIN) if steps > 0 else 0)
        requests.append(ServiceRequest(f"r{i}", node, start, length))
    return metric, tuple(requests)


def generate_partition(values):
    """Tree instance encoding an equal-sum partition question.

    Node 0 is the hub; nodes ``1..n`` hang off it at cost equal to each value;
    ``s`` and ``t`` sit at cost ``6K`` and the midpoint ``v`` at cost ``K``,
    where ``2K`` is the total.  Every window has length ``6K``.  Two windows
    (the first midpoint request and the one at ``t``) start half a unit late
    so that the tight schedule's right-endpoint visits stay inside
    half-open windows; with integer data this keeps the reduction exact.
    """
    values = [int(x) for x in values]
    if not values or any(x <= 0 for x in values):
        raise ValueError("values must be positive integers")
    total = sum(values)
    if total % 2:
        raise ValueError(f"sum {total} is odd; no equal partition is possible")
    K = total // 2
    n = len(values)
    hub, s, t, mid = 0, n + 1, n + 2, n + 3
    edges = [(hub, i + 1, x) for i, x in enumerate(values)]
    edges += [(hub, s, 6 * K), (hub, t, 6 * K), (hub, mid, K)]
    metric = build_metric(n + 4, TREE, edges)
    L = 6 * K
    nudge = Fraction(1, 2)
    reqs = [
        ServiceRequest("s", s, 0, L),
        ServiceRequest("t", t, 12 * K + nudge, L),
        ServiceRequest("u", hub, 6 * K, L),
    ]
    reqs += [ServiceRequest(f"x{i + 1}", i + 1, 6 * K, L) for i in range(n)]
    reqs += [
        ServiceRequest("v1", mid, 3 * K + nudge, L),
        ServiceRequest("v2", mid, 9 * K, L),
    ]
    return metric, tuple(reqs)


def has_equal_partition(values) -> bool:
    """Direct subset-sum decision, independent of any routing."""
    total = sum(values)
    if total % 2:
        return False
    reach = {0}
    for x in values:
        reach |= {r + x for r in reach}
    return total // 2 in reach
