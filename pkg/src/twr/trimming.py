"""Period grids, trimming schemes, limited-loss candidates and racing witnesses."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .core import (
    INF,
    MetricInstance,
    ServiceRun,
    ServiceTour,
    as_rational,
    request_index,
)

HALF = Fraction(1, 2)


@dataclass(frozen=True)
class PeriodGrid:
    period_length: Fraction = HALF
    origin_offset: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "period_length", as_rational(self.period_length))
        object.__setattr__(self, "origin_offset", as_rational(self.origin_offset))
        if self.period_length <= 0:
            raise ValueError("period length must be positive")
        if not 0 <= self.origin_offset < self.period_length:
            raise ValueError("origin offset must lie in [0, period_length)")

    def index(self, t) -> int:
        return math.floor((t - self.origin_offset) / self.period_length)

    def begin(self, i: int) -> Fraction:
        return self.origin_offset + i * self.period_length

    def end(self, i: int) -> Fraction:
        return self.begin(i + 1)

    def interval(self, i: int) -> tuple:
        return (self.begin(i), self.end(i))

    def contained(self, lo, hi) -> range:
        """Indices of periods wholly inside the half-open window ``[lo, hi)``."""
        first = math.ceil((lo - self.origin_offset) / self.period_length)
        last = math.floor((hi - self.origin_offset) / self.period_length) - 1
        return range(first, max(first, last + 1))


@dataclass(frozen=True)
class TrimmedInstance:
    """Request-to-period assignment; ``None`` marks an excluded request."""

    requests: tuple
    grid: PeriodGrid
    assignment: dict = field(hash=False)

    def target(self, rid) -> Optional[tuple]:
        i = self.assignment[rid]
        return None if i is None else self.grid.interval(i)

    def windows(self) -> dict:
        return {rid: self.target(rid) for rid in self.assignment}

    def active(self) -> list:
        return [r for r in self.requests if self.assignment[r.id] is not None]

    def periods(self) -> dict:
        """Occupied period index -> requests trimmed there, in time order."""
        out = {}
        for r in self.active():
            out.setdefault(self.assignment[r.id], []).append(r)
        return dict(sorted(out.items()))

    def as_requests(self) -> tuple:
        """The trimmed instance as plain requests (targets become windows)."""
        from .core import ServiceRequest

        L = self.grid.period_length
        return tuple(
            ServiceRequest(r.id, r.node, self.grid.begin(self.assignment[r.id]), L, r.profit)
            for r in self.active()
        )


def trim_unit(requests) -> TrimmedInstance:
    """Trim unit windows to the half-length period wholly inside them.

    A window starting on a division contains two periods; it keeps the earlier
    one, as if its start had been nudged down by a negligible amount.
    """
    grid = PeriodGrid(HALF, Fraction(0))
    requests = tuple(requests)
    assignment = {}
    for r in requests:
        if r.window_length != 1:
            raise ValueError(f"request {r.id!r} has window length {r.window_length}, not 1")
        cand = grid.contained(r.window_start, r.window_end)
        assignment[r.id] = cand[0]
    return TrimmedInstance(requests, grid, assignment)


@dataclass(frozen=True)
class FactorialDigits:
    """Digits ``(d_u, ..., d_1)`` with ``0 <= d_i <= i``; value ``sum i! d_i``."""

    digits: tuple = ()

    def __post_init__(self):
        u = len(self.digits)
        for pos, d in enumerate(self.digits):
            i = u - pos
            if not 0 <= d <= i:
                raise ValueError(f"digit d_{i}={d} out of range 0..{i}")

    @property
    def width(self) -> int:
        return len(self.digits)

    def digit(self, i: int) -> int:
        """``d_i``; ``d_0`` and digits above the width are zero."""
        if i <= 0 or i > self.width:
            return 0
        return self.digits[self.width - i]


def factorial_encode(k: int, width: int) -> FactorialDigits:
    if width < 0 or not 0 <= k < math.factorial(width + 1):
        raise ValueError(f"{k} not representable with {width} factorial digits")
    digits = []
    for i in range(width, 0, -1):
        f = math.factorial(i)
        digits.append(k // f)
        k %= f
    return FactorialDigits(tuple(digits))


def factorial_decode(fd: FactorialDigits) -> int:
    return sum(math.factorial(fd.width - pos) * d for pos, d in enumerate(fd.digits))


def trim_general(requests, grid: PeriodGrid, choice: FactorialDigits) -> TrimmedInstance:
    """Trim each window to its ``(1 + d_{v-1})``-th wholly contained period.

    ``v`` is the number of contained periods; ``v = 0`` excludes the request.
    """
    requests = tuple(requests)
    assignment = {}
    for r in requests:
        cand = grid.contained(r.window_start, r.window_end)
        v = len(cand)
        if v == 0:
            assignment[r.id] = None
            continue
        w = 1 + choice.digit(v - 1)
        if w > v:
            raise ValueError(f"trim choice {w} exceeds {v} contained periods")
        assignment[r.id] = cand[w - 1]
    return TrimmedInstance(requests, grid, assignment)


def trim_earliest(requests, period_length=HALF) -> TrimmedInstance:
    """Trim every window to its earliest contained period (all-zero digits)."""
    return trim_general(requests, PeriodGrid(period_length, 0), FactorialDigits())


def limited_loss_candidates(run: ServiceRun, trimmed: TrimmedInstance) -> tuple:
    """The three best-of-three runs built from an untrimmed run.

    Returns ``(target, late_shifted, early_shifted)``: events already in their
    target period; the run delayed by one period keeping events that sat in
    the period before the target; the run advanced by one period keeping
    events that sat in the period after it.
    """
    L = trimmed.grid.period_length
    in_target, late, early = [], [], []
    for rid, t in run.events:
        i = trimmed.assignment.get(rid)
        if i is None:
            continue
        j = trimmed.grid.index(t)
        if j == i:
            in_target.append(rid)
        elif j == i - 1:
            late.append(rid)
        elif j == i + 1:
            early.append(rid)
    return (
        run.restricted(in_target),
        run.shifted(L).restricted(late),
        run.shifted(-L).restricted(early),
    )


UNIT = "unit"
ONE_TO_TWO = "one_to_two"
BOUNDED = "bounded"


def racing_factor(window_class: str, D: Optional[int] = None) -> int:
    if window_class == UNIT:
        return 4
    if window_class == ONE_TO_TWO:
        return 6
    if window_class == BOUNDED:
        if D is None or D < 1:
            raise ValueError("bounded window class needs D >= 1")
        return 2 * D + 2
    raise ValueError(f"unknown window class {window_class!r}")


@dataclass(frozen=True)
class RacingWitness:
    """A tour racing back and forth along a base tour at ``factor`` times its speed.

    Positions are arc lengths along the base tour's node sequence.  Before its
    first event the base tour idles at its start node, after its last event
    at its final node.
    """

    nodes: tuple  # base tour node sequence, one per event
    arc: tuple  # cumulative arc position of each base event
    times: tuple  # base tour service times
    base_speed: Fraction
    factor: int
    reach: int  # D in the racing pattern; 1 for unit windows
    trimmed: TrimmedInstance
    schedule: tuple  # (request id, service time, arc position)

    @property
    def speed(self) -> Fraction:
        return self.factor * self.base_speed

    def base_position(self, t) -> Fraction:
        """Arc position of the base tour at time ``t`` (depart at once, then wait)."""
        times, arc = self.times, self.arc
        if t <= times[0]:
            return arc[0]
        for k in range(len(times) - 1):
            if t <= times[k + 1]:
                leg = arc[k + 1] - arc[k]
                return arc[k] + min(leg, self.base_speed * (t - times[k]))
        return arc[-1]

    def virtual_time(self, T) -> Fraction:
        """Base-tour time whose position the witness occupies at time ``T``."""
        F = self.factor
        B = math.floor(T)
        u = T - B
        if u <= HALF:
            return B - HALF + F * u
        turn = 1 - Fraction(1, 2 * F)
        if u <= turn:
            return B - HALF + Fraction(F, 2) - F * (u - HALF)
        return B + F * (u - turn)

    def position(self, T) -> Fraction:
        return self.base_position(self.virtual_time(T))

    def as_run(self) -> ServiceRun:
        events = sorted(((t, str(rid), rid) for rid, t, _ in self.schedule), key=lambda e: (e[0], e[1]))
        return ServiceRun(tuple((rid, t) for t, _, rid in events), self.speed)

    def as_tour(self) -> ServiceTour:
        return ServiceTour(self.as_run(), True)


def _service_time(t, period: int, factor: int, reach: int) -> Fraction:
    a = Fraction(period, 2)
    if period % 2 == 0:
        return a + (t - a + HALF) / factor
    return a + (a + reach - t) / factor


def racing_tour(instance: MetricInstance, requests, tour, window_class: str = UNIT, D=None) -> RacingWitness:
    """Build the racing witness for an untrimmed tour.

    Windows are trimmed to half-length periods (``trim_unit`` for unit windows,
    earliest contained period otherwise) and every request receives a service
    time inside its trimmed period at which the racing traveller stands on the
    request's node.
    """
    run = tour.run if isinstance(tour, ServiceTour) else tour
    by_id = request_index(requests)
    reqs = tuple(by_id.values())
    if not run.events:
        raise ValueError("racing witness needs a nonempty tour")

    lengths = [r.window_length for r in reqs]
    if window_class == UNIT:
        reach = 1
        trimmed = trim_unit(reqs)
    else:
        if min(lengths) < 1:
            raise ValueError("window lengths must be at least 1")
        if window_class == ONE_TO_TWO:
            if max(lengths) >= 2:
                raise ValueError("one_to_two windows must be shorter than 2")
            reach = 2
        else:
            reach = D if D is not None else math.ceil(max(lengths))
            if max(lengths) > reach:
                raise ValueError(f"window length {max(lengths)} exceeds D={reach}")
        trimmed = trim_earliest(reqs)
    factor = racing_factor(window_class, reach)

    s = run.speed
    nodes = tuple(by_id[rid].node for rid, _ in run.events)
    times = tuple(t for _, t in run.events)
    arc = [Fraction(0)]
    for k in range(1, len(nodes)):
        leg = instance.d(nodes[k - 1], nodes[k])
        gap = times[k] - times[k - 1]
        if gap < 0 or (leg > 0 and s * gap < leg):
            raise ValueError("base tour infeasible at its declared speed")
        arc.append(arc[-1] + leg)
    for rid, t in run.events:
        if not by_id[rid].contains(t):
            raise ValueError(f"base tour misses the window of {rid!r}")

    w = RacingWitness(nodes, tuple(arc), times, s, factor, reach, trimmed, ())
    schedule = []
    for k, (rid, t) in enumerate(run.events):
        period = trimmed.assignment[rid]
        T = _service_time(t, period, factor, reach)
        lo, hi = trimmed.grid.interval(period)
        if not (lo <= T < hi) or w.virtual_time(T) != t:
            raise ValueError(f"no racing service time for {rid!r} in period {period}")
        schedule.append((rid, T, arc[k]))
    return RacingWitness(nodes, tuple(arc), times, s, factor, reach, trimmed, tuple(schedule))
