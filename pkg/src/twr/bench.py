"""Ratio benchmarks: solver against oracle on seeded random suites.

A suite spec is JSON::

    {"suites": [
      {"name": "unit-tree", "problem": "repairman", "algorithm": "unit",
       "count": 20, "seed": 0,
       "params": {"node_count": 6, "kind": "tree", "request_count": 6}}
    ]}

Repairman algorithms: ``unit``, ``window12``.  Deliveryman algorithms:
``unit``, ``bounded``.  Ratios are oracle/solver for profit and
solver/oracle for speed.
"""

from __future__ import annotations

import csv
import io
import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Optional

from .core import INF, GRAPH, TREE, as_rational, verify_run
from .deliveryman import delivery_graph, delivery_tree
from .generators import RandomParams, generate_random
from .multiwindow import delivery_bounded, window12
from .oracle import BudgetExceeded, OracleBudget, brute_deliveryman, brute_repairman
from .repairman import solve_repairman
from .trimming import trim_unit

# slack on speed ratios, since oracle speeds are infima
INFIMUM_SLACK = Fraction(1, 10**9)
DEFAULT_EPSILON = Fraction(1, 20)


@dataclass(frozen=True)
class BenchRow:
    instance: str
    problem: str
    algorithm: str
    achieved: Optional[Fraction]
    oracle: Optional[Fraction]
    ratio: Optional[Fraction]
    bound: Fraction
    status: str  # pass, FAIL, skipped, infeasible
    seconds: float


@dataclass
class BenchReport:
    rows: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(r.status in ("pass", "skipped") for r in self.rows)

    def counts(self) -> dict:
        out = {}
        for r in self.rows:
            out[r.status] = out.get(r.status, 0) + 1
        return out

    def to_text(self, times: bool = False) -> str:
        head = ["instance", "problem", "algorithm", "achieved", "oracle", "ratio", "bound", "status"]
        if times:
            head.append("seconds")
        table = [head]
        for r in self.rows:
            row = [r.instance, r.problem, r.algorithm, _fmt(r.achieved), _fmt(r.oracle),
                   _fmt_float(r.ratio), _fmt_float(r.bound), r.status]
            if times:
                row.append(f"{r.seconds:.3f}")
            table.append(row)
        widths = [max(len(row[k]) for row in table) for k in range(len(head))]
        lines = ["  ".join(c.ljust(w) for c, w in zip(row, widths)).rstrip() for row in table]
        summary = ", ".join(f"{k} {v}" for k, v in sorted(self.counts().items())) or "no rows"
        return "\n".join(lines + [f"# {summary}"]) + "\n"

    def to_csv(self, times: bool = False) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        names = [f for f in BenchRow.__dataclass_fields__ if times or f != "seconds"]
        w.writerow(names)
        for r in self.rows:
            d = asdict(r)
            w.writerow([_fmt(d[k]) if isinstance(d[k], (Fraction, float)) and k != "seconds" else d[k]
                        for k in names])
        return buf.getvalue()


def _fmt(x) -> str:
    if x is None:
        return "-"
    if x == INF:
        return "inf"
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def _fmt_float(x) -> str:
    if x is None:
        return "-"
    return "inf" if x == INF else f"{float(x):.4f}"


def _params(raw: dict) -> RandomParams:
    raw = dict(raw)
    for key in ("length_lo", "length_hi", "horizon"):
        if key in raw:
            raw[key] = as_rational(raw[key])
    return RandomParams(**raw)


def _profit_ratio(achieved, opt):
    if opt == 0:
        return Fraction(1)
    return INF if achieved == 0 else Fraction(opt, achieved)


def _speed_ratio(achieved, opt):
    if opt == 0:
        return Fraction(1) if achieved == 0 else INF
    return achieved / opt


def _bound(problem, algorithm, kind, eps, D):
    if problem == "repairman":
        if algorithm == "unit":
            return Fraction(3)
        if algorithm == "window12":
            return Fraction(219, 52)
    else:
        delta = 1 + eps if kind == TREE else Fraction(2)
        if algorithm == "unit":
            return 4 * delta
        if algorithm == "bounded":
            return (2 * D + 2) * delta
    raise ValueError(f"unknown algorithm {algorithm!r} for {problem}")


def _run_one(job):
    name, problem, algorithm, seed, params, eps, budget = job
    t0 = time.perf_counter()
    metric, reqs = generate_random(seed, params)
    D = max((math.ceil(r.window_length) for r in reqs), default=1)
    bound = _bound(problem, algorithm, params.kind, eps, D)
    inst = f"{name}/{seed}"
    try:
        if problem == "repairman":
            opt, _ = brute_repairman(metric, reqs, budget=budget)
        else:
            opt, _ = brute_deliveryman(metric, reqs, budget=budget)
    except BudgetExceeded:
        return BenchRow(inst, problem, algorithm, None, None, None, bound, "skipped", time.perf_counter() - t0)

    if problem == "repairman":
        if algorithm == "unit":
            mode = TREE if metric.is_tree else GRAPH
            run = solve_repairman(metric, reqs, trim_unit(reqs), mode)
        else:
            run = window12(metric, reqs)
        feasible = verify_run(metric, reqs, run).feasible
        achieved = Fraction(run.profit(reqs))
        ratio = _profit_ratio(achieved, opt)
        passed = feasible and ratio <= bound
    else:
        if opt == INF:
            return BenchRow(inst, problem, algorithm, None, opt, None, bound, "infeasible",
                            time.perf_counter() - t0)
        if algorithm == "unit":
            tr = trim_unit(reqs)
            tour = delivery_tree(metric, tr, eps) if metric.is_tree else delivery_graph(metric, tr)
        else:
            tour = delivery_bounded(metric, reqs, eps)
        feasible = verify_run(metric, reqs, tour).feasible
        achieved = tour.speed
        ratio = _speed_ratio(achieved, opt)
        passed = feasible and ratio <= bound * (1 + INFIMUM_SLACK)
    return BenchRow(inst, problem, algorithm, achieved, Fraction(opt), ratio, bound,
                    "pass" if passed else "FAIL", time.perf_counter() - t0)


def _jobs(spec: dict):
    for suite in spec.get("suites", []):
        problem = suite["problem"]
        if problem not in ("repairman", "deliveryman"):
            raise ValueError(f"unknown problem {problem!r}")
        params = _params(suite.get("params", {}))
        eps = as_rational(suite.get("epsilon", DEFAULT_EPSILON))
        b = suite.get("budget", {})
        budget = OracleBudget(b.get("max_requests", 8), b.get("max_nodes", 10), b.get("time_limit"))
        first = int(suite.get("seed", 0))
        for seed in range(first, first + int(suite.get("count", 1))):
            yield (suite.get("name", problem), problem, suite.get("algorithm", "unit"), seed, params, eps, budget)


def run_benchmark(spec, workers: int = 1) -> BenchReport:
    """Run every suite in ``spec`` (dict or JSON text); rows keep suite order."""
    if isinstance(spec, str):
        spec = json.loads(spec)
    jobs = list(_jobs(spec))
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(workers) as pool:
            rows = list(pool.map(_run_one, jobs))
    else:
        rows = [_run_one(j) for j in jobs]
    return BenchReport(rows)
