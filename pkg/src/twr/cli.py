"""Command-line entry point: generate, solve, verify, oracle, bench.

Exit codes: 0 success, 1 infeasible or verification failure, 2 input error.
"""

from __future__ import annotations

import argparse
import sys
from fractions import Fraction

from .bench import run_benchmark
from .core import GRAPH, INF, TREE, verify_run
from .deliveryman import delivery_graph, delivery_tree
from .fileio import ParseError, format_rational, parse_instance, parse_solution, serialize_instance, serialize_solution
from .generators import RandomParams, generate_partition, generate_random
from .multiwindow import delivery_bounded, window12, windowgd
from .oracle import BudgetExceeded, OracleBudget, brute_deliveryman, brute_repairman
from .repairman import ExactPathSolver, WeakenedPathSolver, solve_repairman
from .trimming import trim_unit

EXIT_OK, EXIT_INFEASIBLE, EXIT_INPUT = 0, 1, 2


class InputError(Exception):
    pass


def _rational(text):
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational: {text!r}") from None


def _read(path):
    if path in (None, "-"):
        return sys.stdin.read()
    try:
        with open(path) as fh:
            return fh.read()
    except OSError as exc:
        raise InputError(str(exc)) from None


def _write(text, path):
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def _cmd_gen(args):
    if args.what == "random":
        params = RandomParams(
            node_count=args.nodes,
            kind=args.mode or TREE,
            request_count=args.requests,
            length_lo=args.length_lo,
            length_hi=args.length_hi if args.length_hi is not None else args.length_lo,
            horizon=args.horizon,
            max_weight=args.max_weight,
        )
        metric, reqs = generate_random(args.seed, params)
    else:
        if not args.values:
            raise InputError("gen partition needs at least one integer")
        metric, reqs = generate_partition(args.values)
    _write(serialize_instance(metric, reqs), args.out)
    return EXIT_OK


def _all_unit(reqs):
    return all(r.window_length == 1 for r in reqs)


def _cmd_solve(args):
    metric, reqs = parse_instance(_read(args.instance))
    mode = args.mode or (TREE if metric.is_tree else GRAPH)
    if mode == TREE and not metric.is_tree:
        raise InputError("--mode tree needs a tree instance")
    if args.problem == "repairman":
        solver = WeakenedPathSolver(args.seed) if args.weak else ExactPathSolver()
        if args.pg:
            result = windowgd(metric, reqs, args.pg[0], args.pg[1], solver)
        elif _all_unit(reqs):
            result = solve_repairman(metric, reqs, trim_unit(reqs), mode, solver)
        elif all(1 <= r.window_length < 2 for r in reqs):
            result = window12(metric, reqs, solver)
        else:
            result = windowgd(metric, reqs, 2, 1, solver)
        note = f"# profit {result.profit(reqs)}\n"
    else:
        if _all_unit(reqs):
            tr = trim_unit(reqs)
            result = delivery_tree(metric, tr, args.epsilon) if mode == TREE else delivery_graph(metric, tr)
        else:
            result = delivery_bounded(metric, reqs, args.epsilon)
        note = f"# speed {float(result.speed):.6g}\n"
    report = verify_run(metric, reqs, result)
    _write(note + serialize_solution(result), args.out)
    return EXIT_OK if report.feasible else EXIT_INFEASIBLE


def _cmd_verify(args):
    metric, reqs = parse_instance(_read(args.instance))
    sol = parse_solution(_read(args.solution))
    try:
        report = verify_run(metric, reqs, sol)
    except KeyError as exc:
        raise InputError(f"solution names unknown request {exc}") from None
    if report.feasible:
        _write("feasible\n", args.out)
        return EXIT_OK
    lines = [f"{v.kind} {v.request} {v.detail}".rstrip() for v in report.violations]
    _write("infeasible\n" + "".join(line + "\n" for line in lines), args.out)
    return EXIT_INFEASIBLE


def _cmd_oracle(args):
    metric, reqs = parse_instance(_read(args.instance))
    budget = OracleBudget(args.max_requests, args.max_nodes, args.time_limit)
    trimmed = trim_unit(reqs) if args.trimmed else None
    try:
        if args.problem == "repairman":
            profit, run = brute_repairman(metric, reqs, trimmed, budget)
            _write(f"# optimum profit {profit}\n" + serialize_solution(run), args.out)
            return EXIT_OK
        speed, order = brute_deliveryman(metric, reqs, trimmed, budget)
    except BudgetExceeded as exc:
        raise InputError(f"oracle budget exceeded: {exc}") from None
    if speed == INF:
        _write("infimum speed inf\n", args.out)
        return EXIT_INFEASIBLE
    _write(f"infimum speed {format_rational(speed)}\norder {' '.join(order)}\n", args.out)
    return EXIT_OK


def _cmd_bench(args):
    report = run_benchmark(_read(args.spec), workers=args.workers)
    text = report.to_csv(args.times) if args.csv else report.to_text(args.times)
    _write(text, args.out)
    return EXIT_OK if report.ok else EXIT_INFEASIBLE


def build_parser() -> argparse.ArgumentParser:
    shared = argparse.ArgumentParser(add_help=False)
    shared.add_argument("--seed", type=int, default=0)
    shared.add_argument("--epsilon", type=_rational, default=Fraction(1, 20))
    shared.add_argument("--pg", type=int, nargs=2, metavar=("P", "G"))
    shared.add_argument("--mode", choices=(TREE, GRAPH))
    shared.add_argument("--out", help="output path (default stdout)")

    ap = argparse.ArgumentParser(prog="twr", description="Time-window repairman and deliveryman tools.")
    sub = ap.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="generate an instance")
    gsub = gen.add_subparsers(dest="what", required=True)
    rnd = gsub.add_parser("random", parents=[shared])
    rnd.add_argument("--nodes", type=int, default=6)
    rnd.add_argument("--requests", type=int, default=6)
    rnd.add_argument("--length-lo", type=_rational, default=Fraction(1))
    rnd.add_argument("--length-hi", type=_rational)
    rnd.add_argument("--horizon", type=_rational, default=Fraction(3))
    rnd.add_argument("--max-weight", type=int, default=8)
    part = gsub.add_parser("partition", parents=[shared])
    part.add_argument("values", type=int, nargs="*")
    gen.set_defaults(func=_cmd_gen)

    solve = sub.add_parser("solve", parents=[shared], help="run a solver on an instance file")
    solve.add_argument("problem", choices=("repairman", "deliveryman"))
    solve.add_argument("instance", nargs="?", default="-")
    solve.add_argument("--weak", action="store_true", help="use the factor-2 test path solver")
    solve.set_defaults(func=_cmd_solve)

    ver = sub.add_parser("verify", parents=[shared], help="check a solution against an instance")
    ver.add_argument("instance")
    ver.add_argument("solution", nargs="?", default="-")
    ver.set_defaults(func=_cmd_verify)

    orc = sub.add_parser("oracle", parents=[shared], help="brute-force optimum")
    orc.add_argument("problem", choices=("repairman", "deliveryman"))
    orc.add_argument("instance", nargs="?", default="-")
    orc.add_argument("--trimmed", action="store_true", help="solve on unit-trimmed windows")
    orc.add_argument("--max-requests", type=int, default=8)
    orc.add_argument("--max-nodes", type=int, default=10)
    orc.add_argument("--time-limit", type=float)
    orc.set_defaults(func=_cmd_oracle)

    bench = sub.add_parser("bench", parents=[shared], help="ratio benchmark from a JSON suite spec")
    bench.add_argument("spec", nargs="?", default="-")
    bench.add_argument("--workers", type=int, default=1)
    bench.add_argument("--csv", action="store_true")
    bench.add_argument("--times", action="store_true", help="include wall times")
    bench.set_defaults(func=_cmd_bench)
    return ap


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        return args.func(args)
    except (ParseError, InputError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
