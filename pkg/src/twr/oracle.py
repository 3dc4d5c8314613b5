"""Brute-force exact solvers for desk-scale instances.

These are correctness instruments.  They share nothing with the solvers they
check beyond the metric table and the request type.
"""

from __future__ import annotations

import itertools
import math
import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .core import INF, ServiceRun
from .repairman import ProfitCostProfile


class BudgetExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class OracleBudget:
    max_requests: int = 8
    max_nodes: int = 10
    time_limit: Optional[float] = None  # seconds

    def check(self, n_requests: int, n_nodes: int):
        if n_requests > self.max_requests:
            raise BudgetExceeded(f"{n_requests} requests exceed budget {self.max_requests}")
        if n_nodes > self.max_nodes:
            raise BudgetExceeded(f"{n_nodes} nodes exceed budget {self.max_nodes}")

    def deadline(self):
        return None if self.time_limit is None else time.monotonic() + self.time_limit


def _tick(deadline):
    if deadline is not None and time.monotonic() > deadline:
        raise BudgetExceeded("oracle time limit exceeded")


def _windows(requests, trimmed):
    """``[(request, lo, hi)]`` for every request the oracle may service."""
    out = []
    wins = None if trimmed is None else (trimmed.windows() if hasattr(trimmed, "windows") else trimmed)
    for r in requests:
        if wins is None:
            out.append((r, r.window_start, r.window_end))
        else:
            w = wins.get(r.id)
            if w is not None:
                out.append((r, w[0], w[1]))
    return out


def _lcm_denominator(values):
    L = 1
    for v in values:
        L = L * v.denominator // math.gcd(L, v.denominator)
    return L


def brute_repairman(instance, requests, trimmed=None, budget: OracleBudget = OracleBudget()):
    """Maximum-profit run by exhaustive search over (serviced set, last request).

    For a fixed visiting order the earliest-service schedule with waiting is
    optimal, so keeping only the earliest finishing time per state loses
    nothing.  Times are scaled to integers internally.
    """
    items = _windows(requests, trimmed)
    budget.check(len(items), instance.node_count)
    deadline = budget.deadline()
    n = len(items)
    if n == 0:
        return 0, ServiceRun()
    nodes = sorted({r.node for r, _, _ in items})
    vals = [x for _, lo, hi in items for x in (lo, hi)]
    vals += [instance.d(a, b) for a in nodes for b in nodes]
    L = _lcm_denominator(vals)
    lo = [int(x * L) for _, x, _ in items]
    hi = [int(x * L) for _, _, x in items]
    node = [r.node for r, _, _ in items]
    D = [[int(instance.d(node[i], node[j]) * L) for j in range(n)] for i in range(n)]
    profit = [r.profit for r, _, _ in items]

    # state (mask, last) -> (earliest time, previous last)
    layer = {}
    for i in range(n):
        if lo[i] < hi[i]:
            layer[(1 << i, i)] = (lo[i], None)
    seen = dict(layer)
    best = (0, None)
    while layer:
        _tick(deadline)
        nxt = {}
        for (mask, last), (t, _) in layer.items():
            p = sum(profit[i] for i in range(n) if mask >> i & 1)
            if p > best[0]:
                best = (p, (mask, last))
            row = D[last]
            for j in range(n):
                if mask >> j & 1:
                    continue
                tj = max(lo[j], t + row[j])
                if tj >= hi[j]:
                    continue
                key = (mask | 1 << j, j)
                cur = nxt.get(key)
                if cur is None or tj < cur[0]:
                    nxt[key] = (tj, last)
        seen.update(nxt)
        layer = nxt

    p, state = best
    if state is None:
        return 0, ServiceRun()
    events = []
    mask, last = state
    while last is not None:
        t, prev = seen[(mask, last)]
        events.append((items[last][0].id, Fraction(t, L)))
        mask ^= 1 << last
        last = prev
    events.reverse()
    return p, ServiceRun(tuple(events), Fraction(1))


def brute_deliveryman(instance, requests, trimmed=None, budget: OracleBudget = OracleBudget()):
    """Infimum speed over all visiting orders, with the minimizing order.

    Depth-first over orders; a prefix's speed bound only grows as requests
    are appended, so prefixes already at or above the incumbent are cut.
    """
    items = _windows(requests, trimmed)
    budget.check(len(items), instance.node_count)
    deadline = budget.deadline()
    n = len(items)
    if n == 0:
        return Fraction(0), ()
    best = [INF, None]
    order = []
    cum = []

    def extend(used, value):
        if len(order) == n:
            if value < best[0]:
                best[0] = value
                best[1] = tuple(order)
            return
        _tick(deadline)
        last = order[-1] if order else None
        for j in range(n):
            if used >> j & 1:
                continue
            rj, lj, hj = items[j]
            c_here = Fraction(0) if last is None else cum[-1] + instance.d(items[last][0].node, rj.node)
            v = value
            ok = hj > lj
            for pos, k in enumerate(order):
                span = hj - items[k][1]
                if span <= 0:
                    ok = False
                    break
                c = c_here - cum[pos]
                if c > 0 and c / span > v:
                    v = c / span
            if not ok or v >= best[0]:
                continue
            order.append(j)
            cum.append(c_here)
            extend(used | 1 << j, v)
            order.pop()
            cum.pop()

    extend(0, Fraction(0))
    if best[1] is None:
        return INF, ()
    return best[0], tuple(items[k][0].id for k in best[1])


def brute_path_profile(metric, profits, s, t, max_nodes: int = 9) -> ProfitCostProfile:
    """Least cost per profit level over every simple ``s``-``t`` node sequence.

    When ``s == t`` the sequences are closed tours ``s, x_1, ..., x_r, s``.
    """
    profits = dict(profits)
    nodes = sorted(set(profits) | {s, t})
    if len(nodes) > max_nodes:
        raise BudgetExceeded(f"{len(nodes)} nodes exceed budget {max_nodes}")
    total = sum(profits.values())
    exact = [INF] * (total + 1)
    inner = [x for x in nodes if x not in (s, t)]
    for r in range(len(inner) + 1):
        for sub in itertools.permutations(inner, r):
            path = (s,) + sub + (t,)
            cost = sum((metric.d(a, b) for a, b in zip(path, path[1:])), Fraction(0))
            p = sum(profits.get(x, 0) for x in set(path))
            if cost < exact[p]:
                exact[p] = cost
    at_least = list(exact)
    for p in range(total - 1, -1, -1):
        at_least[p] = min(at_least[p], at_least[p + 1])
    return ProfitCostProfile(tuple(at_least))
