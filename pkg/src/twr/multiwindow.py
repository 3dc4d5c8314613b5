"""Drivers for windows of unequal length.

Repairman: enumerate shifted period grids and trim choices, solve each
trimmed instance, keep the best run.  Deliveryman: trim to the earliest
contained half-period and hand off to the unit-window solvers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .core import ServiceRun, as_rational, build_metric
from .deliveryman import delivery_graph, delivery_tree
from .repairman import GRAPH_MODE, TREE_MODE, PathSolver, solve_repairman
from .trimming import PeriodGrid, factorial_encode, trim_earliest, trim_general


@dataclass(frozen=True)
class Phase:
    period_length: Fraction
    offsets: tuple
    choice_count: int
    digit_width: int

    def grids(self):
        return [PeriodGrid(self.period_length, off) for off in self.offsets]


@dataclass(frozen=True)
class PhasePlan:
    phases: tuple

    @property
    def call_count(self) -> int:
        return sum(len(ph.offsets) * ph.choice_count for ph in self.phases)

    def summary(self) -> list:
        """``[(period_length, offsets, choice_count)]`` per phase."""
        return [(ph.period_length, ph.offsets, ph.choice_count) for ph in self.phases]


def windowg_plan(p: int, g: int) -> PhasePlan:
    """Grids and trim-choice counts for length range ``[1, 1 + p / 2**g]``.

    Phase ``i`` uses periods of length ``(i + 2**g) q`` with ``q = 1 / 2**(g+1)``,
    ``i + 2**g`` offsets spaced ``q`` apart, and ``(p + g - i)!`` trim choices.
    """
    if p < 1 or g < 1:
        raise ValueError("p and g must be at least 1")
    q = Fraction(1, 2 ** (g + 1))
    phases = []
    for i in range(p + 1):
        count = i + 2**g
        width = p + g - i - 1
        phases.append(Phase(count * q, tuple(j * q for j in range(count)), math.factorial(width + 1), width))
    return PhasePlan(tuple(phases))


WINDOW12_PLAN = [
    (Fraction(1, 2), (Fraction(0), Fraction(1, 4)), 6),
    (Fraction(3, 4), (Fraction(0), Fraction(1, 4), Fraction(1, 2)), 2),
    (Fraction(1), (Fraction(0), Fraction(1, 4), Fraction(1, 2), Fraction(3, 4)), 1),
]

RHO = {2: Fraction(52, 219), 3: Fraction(4954, 24619), 4: Fraction(258044, 1427019)}


@dataclass(frozen=True)
class SearchResult:
    run: ServiceRun
    profit: int
    calls: int
    best: Optional[tuple]  # (phase, offset, choice) of the winning call


def _mode(instance):
    return TREE_MODE if instance.is_tree else GRAPH_MODE


def _check_lengths(requests, lo, hi, hi_closed=True):
    for r in requests:
        L = r.window_length
        if L < lo or L > hi or (L == hi and not hi_closed):
            bracket = "]" if hi_closed else ")"
            raise ValueError(f"request {r.id!r} window length {L} outside [{lo}, {hi}{bracket}")


def windowg_search(instance, requests, p: int, g: int, solver: Optional[PathSolver] = None,
                   check: bool = True) -> SearchResult:
    """Run every (grid, trim choice) of the plan; keep the first best run."""
    plan = windowg_plan(p, g)
    requests = tuple(requests)
    if check:
        _check_lengths(requests, 1, 1 + Fraction(p, 2**g))
    mode = _mode(instance)
    best = SearchResult(ServiceRun(), 0, 0, None)
    calls = 0
    for pi, phase in enumerate(plan.phases):
        for grid in phase.grids():
            for k in range(phase.choice_count):
                trimmed = trim_general(requests, grid, factorial_encode(k, phase.digit_width))
                run = solve_repairman(instance, requests, trimmed, mode, solver)
                calls += 1
                profit = run.profit(requests)
                if profit > best.profit:
                    best = SearchResult(run, profit, 0, (pi, grid.origin_offset, k))
    return SearchResult(best.run, best.profit, calls, best.best)


def windowg(instance, requests, p: int, g: int, solver: Optional[PathSolver] = None) -> ServiceRun:
    return windowg_search(instance, requests, p, g, solver).run


def window12_search(instance, requests, solver: Optional[PathSolver] = None) -> SearchResult:
    """Lengths in ``[1, 2)``: the (2, 1) plan, checked against its fixed table."""
    assert windowg_plan(2, 1).summary() == WINDOW12_PLAN
    requests = tuple(requests)
    _check_lengths(requests, 1, 2, hi_closed=False)
    return windowg_search(instance, requests, 2, 1, solver, check=False)


def window12(instance, requests, solver: Optional[PathSolver] = None) -> ServiceRun:
    return window12_search(instance, requests, solver).run


def class_count(D, b) -> int:
    """Smallest ``c >= 1`` with ``b**c >= D``."""
    D, b = as_rational(D), as_rational(b)
    c = 1
    while b**c < D:
        c += 1
    return c


def length_class(length, b) -> int:
    """``r`` with ``b**r <= length < b**(r+1)``."""
    length, b = as_rational(length), as_rational(b)
    if length < 1:
        raise ValueError(f"window length {length} below 1")
    r = 0
    while b ** (r + 1) <= length:
        r += 1
    return r


def partition_by_length(requests, b) -> dict:
    out = {}
    for r in requests:
        out.setdefault(length_class(r.window_length, b), []).append(r)
    return {k: tuple(v) for k, v in sorted(out.items())}


def scale_instance(instance, requests, c):
    """Multiply every distance and time by ``c`` (exact)."""
    c = as_rational(c)
    metric = build_metric(instance.node_count, instance.kind, [(u, v, w * c) for u, v, w in instance.edges])
    reqs = tuple(
        type(r)(r.id, r.node, r.window_start * c, r.window_length * c, r.profit) for r in requests
    )
    return metric, reqs


def scale_run(run: ServiceRun, c) -> ServiceRun:
    c = as_rational(c)
    return ServiceRun(tuple((rid, t * c) for rid, t in run.events), run.speed)


@dataclass(frozen=True)
class ClassResult:
    run: ServiceRun
    profit: int
    per_class: dict  # class index -> profit of that class's run
    calls: int


def windowgd_search(instance, requests, p: int, g: int, solver: Optional[PathSolver] = None) -> ClassResult:
    requests = tuple(requests)
    if not requests:
        raise ValueError("windowgd needs at least one request")
    b = 1 + Fraction(p, 2**g)
    best = (ServiceRun(), 0)
    per_class = {}
    calls = 0
    for r, members in partition_by_length(requests, b).items():
        scale = b**r
        metric, scaled = scale_instance(instance, members, 1 / scale)
        res = windowg_search(metric, scaled, p, g, solver)
        calls += res.calls
        per_class[r] = res.profit
        if res.profit > best[1]:
            best = (scale_run(res.run, scale), res.profit)
    return ClassResult(best[0], best[1], per_class, calls)


def windowgd(instance, requests, p: int, g: int, solver: Optional[PathSolver] = None) -> ServiceRun:
    return windowgd_search(instance, requests, p, g, solver).run


_B1 = (Fraction(1, 3), Fraction(7, 24), Fraction(1, 4), Fraction(9, 40), Fraction(1, 5))
_B2 = (Fraction(1, 9), Fraction(2, 9), Fraction(1, 3), Fraction(11, 36), Fraction(5, 18))
_B3 = (Fraction(0), Fraction(1, 12), Fraction(1, 6), Fraction(1, 4), Fraction(1, 3))
_WEIGHTS = (Fraction(50, 73), Fraction(6, 73), Fraction(17, 73))


def evaluate_bound12(h) -> Fraction:
    """Mixed guarantee of the three phases for profit shares ``(h3, ..., h7)``."""
    h = tuple(as_rational(x) for x in h)
    if len(h) != 5 or any(x < 0 for x in h) or sum(h) != 1:
        raise ValueError(f"{h} is not on the 5-simplex")
    return sum(
        (w * sum((c * x for c, x in zip(B, h)), Fraction(0)) for w, B in zip(_WEIGHTS, (_B1, _B2, _B3))),
        Fraction(0),
    )


def bounded_factor(D: int) -> int:
    return 2 * D + 2


def delivery_bounded(instance, requests, epsilon=Fraction(1, 10)):
    """Deliveryman for window lengths in ``[1, D]`` with ``D = ceil(max length)``.

    Trims to earliest contained half-periods, then runs the tree search or
    the MST chain.  Speed is within ``(2D + 2)`` times the trimmed factor of
    the optimum.
    """
    requests = tuple(requests)
    for r in requests:
        if r.window_length < 1:
            raise ValueError(f"request {r.id!r} window length {r.window_length} below 1; rescale first")
    trimmed = trim_earliest(requests)
    if instance.is_tree:
        return delivery_tree(instance, trimmed, epsilon)
    return delivery_graph(instance, trimmed)
