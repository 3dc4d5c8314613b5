"""Profit-maximizing solvers on trimmed windows.

Tree mode combines per-period profit/cost profiles from a bottom-up sweep of
the tree; graph mode asks a pluggable source-sink path solver instead.  Both
feed the same period-by-period table of earliest arrivals.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from . import _trees
from .core import INF, MetricInstance, ServiceRun

TREE_MODE = "tree"
GRAPH_MODE = "graph"


class Unachievable(LookupError):
    """No path reaches the requested profit."""


@dataclass(frozen=True)
class ProfitCostProfile:
    """``costs[p]``: least cost to collect profit at least ``p``.

    ``nodes[p]``, when present, is the node set visited by a cheapest witness.
    """

    costs: tuple
    nodes: Optional[tuple] = None

    def __getitem__(self, p: int):
        if p < 0:
            return self.costs[0]
        if p >= len(self.costs):
            return INF
        return self.costs[p]

    def __len__(self):
        return len(self.costs)

    @property
    def max_profit(self) -> int:
        return len(self.costs) - 1

    def as_dict(self) -> dict:
        return {p: c for p, c in enumerate(self.costs) if c != INF}

    def shifted(self, delta) -> "ProfitCostProfile":
        return ProfitCostProfile(tuple(c + delta for c in self.costs), self.nodes)


def _merge(Lu, Lv, w):
    """Min-plus merge of a node's list with a child's list (child edge doubled)."""
    shifted = [(Fraction(0), frozenset())] + [(c + 2 * w, s) for c, s in Lv[1:]]
    out = [None] * (len(Lu) + len(Lv) - 1)
    for a, (cu, su) in enumerate(Lu):
        for b, (cv, sv) in enumerate(shifted):
            c = cu + cv
            cur = out[a + b]
            if cur is None or c < cur[0]:
                out[a + b] = (c, su | sv)
    return out


def _sweep(adj, profits, u, parent):
    L = [(Fraction(0), frozenset([u]))] * (profits.get(u, 0) + 1)
    for v, w in adj[u]:
        if v == parent:
            continue
        L = _merge(L, _sweep(adj, profits, v, u), w)
    return L


def _check_tree(tree: MetricInstance):
    if not tree.is_tree:
        raise ValueError("sweep_tree needs a tree metric (cycle detected)")


def sweep_tree(tree: MetricInstance, profits, root: int) -> ProfitCostProfile:
    """Extra cost of collecting each profit level from subtrees hanging off ``root``."""
    _check_tree(tree)
    L = _sweep(tree.neighbors(), dict(profits), root, None)
    return ProfitCostProfile(tuple(c for c, _ in L), tuple(s for _, s in L))


def tree_path_profile(tree: MetricInstance, profits, s: int, t: int) -> ProfitCostProfile:
    """Least walk length from ``s`` to ``t`` for every profit level.

    The ``s``-``t`` path is contracted into one root carrying the path's
    profit; the root's list then gets ``d(s, t)`` added.
    """
    _check_tree(tree)
    profits = dict(profits)
    parent, _, _ = _trees.rooted(tree, s)
    path = []
    x = t
    while x is not None:
        path.append(x)
        x = parent[x]
    on_path = set(path)
    adj = tree.neighbors()
    root_profit = sum(profits.get(x, 0) for x in on_path)
    L = [(Fraction(0), frozenset(on_path))] * (root_profit + 1)
    for x in sorted(on_path):
        for v, w in adj[x]:
            if v not in on_path:
                L = _merge(L, _sweep(adj, profits, v, x), w)
    base = tree.d(s, t)
    return ProfitCostProfile(tuple(c + base for c, _ in L), tuple(n for _, n in L))


@dataclass(frozen=True)
class PathResult:
    path: tuple
    cost: Fraction
    profit: int

    def excess(self, metric) -> Fraction:
        return self.cost - metric.d(self.path[0], self.path[-1])


def path_profit(profits, path) -> int:
    return sum(profits.get(x, 0) for x in set(path))


class PathSolver:
    """Source-sink k-path provider.

    ``solve`` returns a path from ``s`` to ``t`` whose profit is at least
    ``k / gamma`` and whose cost is at most the optimal ``k``-path cost, or
    ``None`` when profit ``k`` is out of reach.
    """

    gamma = 1

    def solve(self, metric, profits, s, t, k) -> Optional[PathResult]:
        raise NotImplementedError


class ExactPathSolver(PathSolver):
    """Subset dynamic program over (visited set, current node)."""

    gamma = 1

    def __init__(self, cap: int = 15):
        self.cap = cap
        self._tables = {}

    def _table(self, metric, profits, s):
        key = (metric, frozenset(profits.items()), s)
        tab = self._tables.get(key)
        if tab is not None:
            return tab
        nodes = sorted(set(profits) | {s})
        n = len(nodes)
        if n > self.cap:
            raise ValueError(f"{n} nodes exceed the exact solver cap of {self.cap}")
        w = [profits.get(x, 0) for x in nodes]
        D = [[metric.d(a, b) for b in nodes] for a in nodes]
        si = nodes.index(s)
        start = 1 << si
        dp = {start: {si: (Fraction(0), None)}}
        for mask in range(1 << n):
            row = dp.get(mask)
            if row is None:
                continue
            for v, (c, _) in row.items():
                Dv = D[v]
                for x in range(n):
                    bit = 1 << x
                    if mask & bit:
                        continue
                    nm = mask | bit
                    nc = c + Dv[x]
                    nrow = dp.setdefault(nm, {})
                    cur = nrow.get(x)
                    if cur is None or nc < cur[0]:
                        nrow[x] = (nc, v)
        total = sum(w)
        # best[t][p] = (cost, mask, end) for profit at least p; end is the
        # last node before closing the tour when t == s
        best = {}
        for mask, row in dp.items():
            prof = sum(w[i] for i in range(n) if mask >> i & 1)
            for v, (c, _) in row.items():
                for t, cost, end in ((v, c, v), (si, c + D[v][si], v)):
                    lst = best.setdefault(t, [None] * (total + 1))
                    cur = lst[prof]
                    if cur is None or cost < cur[0]:
                        lst[prof] = (cost, mask, end)
        for v, lst in best.items():
            for p in range(total - 1, -1, -1):
                if lst[p + 1] is not None and (lst[p] is None or lst[p + 1][0] < lst[p][0]):
                    lst[p] = lst[p + 1]
        tab = (nodes, dp, best)
        self._tables[key] = tab
        return tab

    def solve(self, metric, profits, s, t, k):
        profits = dict(profits)
        profits.setdefault(t, 0)
        nodes, dp, best = self._table(metric, profits, s)
        ti = nodes.index(t)
        lst = best.get(ti)
        k = max(int(math.ceil(k)), 0)
        if lst is None or k >= len(lst) or lst[k] is None:
            return None
        cost, mask, v = lst[k]
        path = [nodes[ti]] if v != ti else []
        while v is not None:
            path.append(nodes[v])
            pv = dp[mask][v][1]
            mask ^= 1 << v
            v = pv
        path.reverse()
        return PathResult(tuple(path), cost, path_profit(profits, path))


class WeakenedPathSolver(PathSolver):
    """Deliberately lossy solver for exercising the ``gamma > 1`` analysis.

    Each query is answered exactly for either the full target or half of it,
    chosen at random; profit is therefore at least ``k/2`` while cost never
    exceeds the optimal ``k``-path cost.
    """

    gamma = 2

    def __init__(self, seed: int = 0, base: Optional[PathSolver] = None):
        self.rng = random.Random(seed)
        self.base = base or ExactPathSolver()

    def solve(self, metric, profits, s, t, k):
        target = k if self.rng.random() < 0.5 else math.ceil(k / 2)
        return self.base.solve(metric, profits, s, t, target)


_DEFAULT_SOLVER = ExactPathSolver()


def kssp_exact(metric, profits, s, t, k, cap: int = 15) -> PathResult:
    """Least-cost simple path from ``s`` to ``t`` with profit at least ``k``."""
    solver = _DEFAULT_SOLVER if cap == _DEFAULT_SOLVER.cap else ExactPathSolver(cap)
    res = solver.solve(metric, dict(profits), s, t, k)
    if res is None:
        raise Unachievable(f"no {s}-{t} path collects profit {k}")
    return res


def _dedupe(path):
    out = [path[0]]
    for x in path[1:]:
        if x != out[-1]:
            out.append(x)
    return tuple(out)


def reduced_path(metric, profits, s, t, k, solver: Optional[PathSolver] = None, beta=1) -> PathResult:
    """Best ``s -> u ~> v -> t`` composition over all inner endpoint pairs.

    The solver runs between every pair ``(u, v)`` at profit ``k / beta``; the
    pair minimizing ``c(B_uv) + d(s, u) + d(v, t)`` wins.
    """
    solver = solver or _DEFAULT_SOLVER
    profits = dict(profits)
    target = math.ceil(Fraction(k) / Fraction(beta))
    nodes = sorted(set(profits) | {s, t})
    best = None
    for u in nodes:
        for v in nodes:
            res = solver.solve(metric, profits, u, v, target)
            if res is None:
                continue
            score = res.cost + metric.d(s, u) + metric.d(v, t)
            if best is None or score < best[0]:
                best = (score, res)
    if best is None:
        raise Unachievable(f"no {s}-{t} path collects profit {target}")
    score, res = best
    path = _dedupe((s,) + res.path + (t,))
    return PathResult(path, score, path_profit(profits, path))


@dataclass(frozen=True)
class PathOption:
    """One way to spend a period: walk from the start node, end at ``end``.

    ``services`` lists ``(node, arc)`` first visits of profitable nodes;
    ``last`` is the arc position of the final service.
    """

    end: int
    cost: Fraction
    last: Fraction
    services: tuple
    profit: int


def _option(metric, profits, walk):
    visits = _trees.first_visits(metric, walk)
    services = tuple(sorted(((x, a) for x, a in visits.items() if profits.get(x, 0) > 0), key=lambda e: (e[1], e[0])))
    last = max((a for _, a in services), default=Fraction(0))
    return PathOption(
        walk[-1],
        _trees.walk_length(metric, walk),
        last,
        services,
        sum(profits[x] for x, _ in services),
    )


def _keep_best(opts):
    best = {}
    for o in opts:
        key = (o.end, frozenset(x for x, _ in o.services))
        cur = best.get(key)
        if cur is None or (o.cost, o.last) < (cur.cost, cur.last):
            best[key] = o
    return sorted(best.values(), key=lambda o: (o.end, o.cost, o.last, -o.profit))


def tree_options(tree, profits, s):
    """Period walks from ``s`` for every final node and profit level (tree mode)."""
    ends = sorted({s} | {x for x, p in profits.items() if p > 0})
    opts = []
    for y in ends:
        prof = tree_path_profile(tree, profits, s, y)
        for p in range(len(prof)):
            walk = _trees.tree_walk(tree, prof.nodes[p], s, y)
            opt = _option(tree, profits, walk)
            assert opt.cost == prof[p]
            opts.append(opt)
    return _keep_best(opts)


def graph_options(metric, profits, s, solver: Optional[PathSolver] = None):
    """Period walks from ``s`` built from ``reduced_path`` (graph mode)."""
    ends = sorted({s} | {x for x, p in profits.items() if p > 0})
    total = sum(profits.values())
    opts = []
    for y in ends:
        for p in range(total + 1):
            try:
                res = reduced_path(metric, profits, s, y, p, solver)
            except Unachievable:
                continue
            opts.append(_option(metric, profits, list(res.path)))
    return _keep_best(opts)


def _events_key(events):
    return tuple((str(rid), t) for rid, t in events)


@dataclass
class ArrivalTable:
    """Earliest arrival ``A[request][profit]`` and the run achieving it."""

    entries: dict = field(default_factory=dict)
    best_profit: int = 0
    best_events: tuple = ()

    def get(self, rid) -> dict:
        return self.entries.get(rid, {})

    def offer(self, rid, profit, arrival, events) -> bool:
        row = self.entries.setdefault(rid, {})
        cur = row.get(profit)
        if cur is not None:
            new_key = (arrival, len(events), _events_key(events))
            old_key = (cur[0], len(cur[1]), _events_key(cur[1]))
            if new_key >= old_key:
                return False
        row[profit] = (arrival, tuple(events))
        return True

    def finish(self, profit, events):
        if profit > self.best_profit or (
            profit == self.best_profit
            and profit > 0
            and (len(events), _events_key(events)) < (len(self.best_events), _events_key(self.best_events))
        ):
            self.best_profit = profit
            self.best_events = tuple(events)

    def normalized(self, rid):
        """Entries not dominated by a higher profit reached no later."""
        row = sorted(self.get(rid).items(), reverse=True)
        out = []
        earliest = INF
        for k, (A, ev) in row:
            if A < earliest:
                out.append((k, A, ev))
                earliest = A
        return sorted(out)


class _Context:
    def __init__(self, instance, trimmed, mode, solver):
        if mode == TREE_MODE and not instance.is_tree:
            raise ValueError("tree mode needs a tree metric")
        if mode not in (TREE_MODE, GRAPH_MODE):
            raise ValueError(f"unknown mode {mode!r}")
        self.instance = instance
        self.trimmed = trimmed
        self.mode = mode
        self.solver = solver or _DEFAULT_SOLVER
        self.periods = trimmed.periods()
        self.order = list(self.periods)
        self._options = {}

    def options(self, period, start):
        key = (period, start.id)
        opts = self._options.get(key)
        if opts is None:
            profits = self.profits(period, start)
            if self.mode == TREE_MODE:
                opts = tree_options(self.instance, profits, start.node)
            else:
                opts = graph_options(self.instance, profits, start.node, self.solver)
            self._options[key] = opts
        return opts

    def profits(self, period, start):
        out = {}
        for r in self.periods[period]:
            if r.id != start.id:
                out[r.node] = out.get(r.node, 0) + r.profit
        return out

    def node_requests(self, period, start):
        out = {}
        for r in sorted(self.periods[period], key=lambda r: str(r.id)):
            if r.id != start.id:
                out.setdefault(r.node, []).append(r.id)
        return out


def init_table(ctx: _Context) -> ArrivalTable:
    table = ArrivalTable()
    grid = ctx.trimmed.grid
    for i, reqs in ctx.periods.items():
        for r in reqs:
            b = grid.begin(i)
            table.offer(r.id, r.profit, b, ((r.id, b),))
            table.finish(r.profit, ((r.id, b),))
    return table


def process_period(table: ArrivalTable, ctx: _Context, period: int, normalize: bool = True) -> ArrivalTable:
    """Extend every recorded run ending in ``period`` through the period.

    Each start request tries every period walk; a walk is usable when its
    last service falls before the period ends.  Completed runs are offered to
    the table's best; runs continuing to a request of a later period update
    that request's earliest arrival for the new profit.
    """
    grid = ctx.trimmed.grid
    metric = ctx.instance
    begin, end = grid.interval(period)
    later = [(a, grid.interval(a), ctx.periods[a]) for a in ctx.order if a > period]
    for start in sorted(ctx.periods[period], key=lambda r: str(r.id)):
        if normalize:
            rows = table.normalized(start.id)
        else:
            rows = [(k, A, ev) for k, (A, ev) in sorted(table.get(start.id).items())]
        if not rows:
            continue
        opts = ctx.options(period, start)
        at_node = ctx.node_requests(period, start)
        for k, A, events in rows:
            A = max(A, begin)
            for opt in opts:
                if A + opt.last >= end:
                    continue
                served = tuple((rid, A + arc) for x, arc in opt.services for rid in at_node[x])
                prefix = events + served
                gained = k + opt.profit
                table.finish(gained, prefix)
                leave = A + opt.cost
                for a, (b_a, e_a), reqs in later:
                    for nxt in reqs:
                        arrive = leave + metric.d(opt.end, nxt.node)
                        if arrive >= e_a:
                            continue
                        arrive = max(arrive, b_a)
                        table.offer(nxt.id, gained + nxt.profit, arrive, prefix + ((nxt.id, arrive),))
    return table


def solve_repairman(instance, requests, trimmed, mode: str = TREE_MODE, solver: Optional[PathSolver] = None,
                    normalize: bool = True) -> ServiceRun:
    """Best run on trimmed windows found by the period dynamic program.

    Tree mode is exactly optimal for the trimmed instance; graph mode with a
    solver of factor ``gamma`` keeps at least ``1/gamma`` of that optimum.
    """
    ctx = _Context(instance, trimmed, mode, solver)
    if not ctx.periods:
        return ServiceRun()
    table = init_table(ctx)
    for i in ctx.order:
        process_period(table, ctx, i, normalize)
    return ServiceRun(table.best_events, Fraction(1))
