"""Line-oriented text format for instances and solutions.

Instance::

    twr 1
    metric tree
    node 0
    node 1
    edge 0 1 3/2
    request r0 1 0 1
    request r1 0 1/2 1 2

Solution::

    twr 1
    solution deliveryman
    speed 7/2
    event r0 1/4

Blank lines and ``#`` comments are ignored.  Numbers are integers, ``p/q``
or terminating decimals; output always uses integers or ``p/q``.
"""

from __future__ import annotations

import re
from fractions import Fraction

from .core import GRAPH, TREE, MetricError, ServiceRequest, ServiceRun, ServiceTour, build_metric

MAGIC = "twr"
VERSION = "1"
REPAIRMAN = "repairman"
DELIVERYMAN = "deliveryman"

_NUMBER = re.compile(r"-?\d+(/\d+|\.\d+)?")
_INT = re.compile(r"\d+")
_ID = re.compile(r"[A-Za-z0-9_.:\-]+")


class ParseError(ValueError):
    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line
        self.message = message


def format_rational(x) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def parse_rational(tok: str, line: int) -> Fraction:
    if not _NUMBER.fullmatch(tok):
        raise ParseError(f"bad number {tok!r}", line)
    if "/" in tok and int(tok.split("/")[1]) == 0:
        raise ParseError(f"zero denominator in {tok!r}", line)
    return Fraction(tok)


def _parse_int(tok: str, line: int, what: str) -> int:
    if not _INT.fullmatch(tok):
        raise ParseError(f"bad {what} {tok!r}", line)
    return int(tok)


def _lines(text):
    for no, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0].split()
        if body:
            yield no, body


def _arity(toks, n, line, form):
    if len(toks) not in (n if isinstance(n, tuple) else (n,)):
        raise ParseError(f"expected '{form}'", line)


def _header(lines):
    try:
        no, toks = next(lines)
    except StopIteration:
        raise ParseError("empty file", 1) from None
    if toks != [MAGIC, VERSION]:
        raise ParseError(f"expected header '{MAGIC} {VERSION}'", no)
    return no


def parse_instance(text: str):
    """``(MetricInstance, requests)`` from instance text."""
    lines = _lines(text)
    last = _header(lines)
    kind = None
    kind_line = last
    nodes = {}
    edges = []
    requests = []
    seen_ids = {}
    for no, toks in lines:
        last = no
        head = toks[0]
        if head == "metric":
            _arity(toks, 2, no, "metric tree|graph")
            if kind is not None:
                raise ParseError("duplicate metric directive", no)
            if toks[1] not in (TREE, GRAPH):
                raise ParseError(f"unknown metric kind {toks[1]!r}", no)
            kind, kind_line = toks[1], no
        elif head == "node":
            _arity(toks, 2, no, "node <id>")
            v = _parse_int(toks[1], no, "node id")
            if v in nodes:
                raise ParseError(f"duplicate node {v}", no)
            nodes[v] = no
        elif head == "edge":
            _arity(toks, 4, no, "edge <u> <v> <weight>")
            u = _parse_int(toks[1], no, "node id")
            v = _parse_int(toks[2], no, "node id")
            if u == v:
                raise ParseError(f"self-loop at node {u}", no)
            w = parse_rational(toks[3], no)
            if w <= 0:
                raise ParseError(f"edge weight {toks[3]} must be positive", no)
            edges.append((u, v, w, no))
        elif head == "request":
            _arity(toks, (5, 6), no, "request <id> <node> <start> <length> [<profit>]")
            rid = toks[1]
            if not _ID.fullmatch(rid):
                raise ParseError(f"bad request id {rid!r}", no)
            if rid in seen_ids:
                raise ParseError(f"duplicate request id {rid!r}", no)
            node = _parse_int(toks[2], no, "node id")
            start = parse_rational(toks[3], no)
            length = parse_rational(toks[4], no)
            if length <= 0:
                raise ParseError(f"window length {toks[4]} must be positive", no)
            profit = _parse_int(toks[5], no, "profit") if len(toks) == 6 else 1
            if profit < 1:
                raise ParseError("profit must be a positive integer", no)
            seen_ids[rid] = no
            requests.append((ServiceRequest(rid, node, start, length, profit), no))
        else:
            raise ParseError(f"unknown directive {head!r}", no)

    if kind is None:
        raise ParseError("missing metric directive", last)
    if not nodes:
        raise ParseError("no nodes declared", last)
    n = len(nodes)
    for v, no in nodes.items():
        if v >= n:
            raise ParseError(f"node ids must be 0..{n - 1}; got {v}", no)
    for u, v, _, no in edges:
        for x in (u, v):
            if x not in nodes:
                raise ParseError(f"edge references unknown node {x}", no)
    for r, no in requests:
        if r.node not in nodes:
            raise ParseError(f"request {r.id!r} at unknown node {r.node}", no)
    try:
        metric = build_metric(n, kind, [(u, v, w) for u, v, w, _ in edges])
    except MetricError as exc:
        raise ParseError(str(exc), kind_line) from None
    return metric, tuple(r for r, _ in requests)


def serialize_instance(metric, requests) -> str:
    out = [f"{MAGIC} {VERSION}", f"metric {metric.kind}"]
    out += [f"node {v}" for v in range(metric.node_count)]
    out += [f"edge {u} {v} {format_rational(w)}" for u, v, w in metric.edges]
    for r in requests:
        line = f"request {r.id} {r.node} {format_rational(r.window_start)} {format_rational(r.window_length)}"
        if r.profit != 1:
            line += f" {r.profit}"
        out.append(line)
    return "\n".join(out) + "\n"


def parse_solution(text: str):
    """``ServiceRun`` (repairman) or ``ServiceTour`` (deliveryman)."""
    lines = _lines(text)
    last = _header(lines)
    problem = None
    speed = None
    events = []
    for no, toks in lines:
        last = no
        head = toks[0]
        if head == "solution":
            _arity(toks, 2, no, "solution repairman|deliveryman")
            if problem is not None:
                raise ParseError("duplicate solution directive", no)
            if toks[1] not in (REPAIRMAN, DELIVERYMAN):
                raise ParseError(f"unknown problem {toks[1]!r}", no)
            problem = toks[1]
        elif head == "speed":
            _arity(toks, 2, no, "speed <s>")
            if speed is not None:
                raise ParseError("duplicate speed directive", no)
            speed = parse_rational(toks[1], no)
            if speed < 0:
                raise ParseError("speed must be nonnegative", no)
        elif head == "event":
            _arity(toks, 3, no, "event <request-id> <time>")
            if not _ID.fullmatch(toks[1]):
                raise ParseError(f"bad request id {toks[1]!r}", no)
            events.append((toks[1], parse_rational(toks[2], no)))
        else:
            raise ParseError(f"unknown directive {head!r}", no)
    if problem is None:
        raise ParseError("missing solution directive", last)
    if problem == DELIVERYMAN:
        if speed is None:
            raise ParseError("deliveryman solution needs a speed", last)
        return ServiceTour(ServiceRun(tuple(events), speed), True)
    return ServiceRun(tuple(events), Fraction(1) if speed is None else speed)


def serialize_solution(solution) -> str:
    tour = isinstance(solution, ServiceTour)
    run = solution.run if tour else solution
    out = [f"{MAGIC} {VERSION}", f"solution {DELIVERYMAN if tour else REPAIRMAN}"]
    if tour or run.speed != 1:
        out.append(f"speed {format_rational(run.speed)}")
    out += [f"event {rid} {format_rational(t)}" for rid, t in run.events]
    return "\n".join(out) + "\n"
