"""Empirical approximation ratios against the exact oracles.

For each seed, compares the repairman solvers (unit windows, tree and
graph) and the deliveryman solvers against brute-force optima and prints
worst and mean ratios next to the proved bounds.

    python3 scripts/ratio_survey.py [--count N] [--requests K]
"""
import argparse
from fractions import Fraction
from statistics import mean

from twr.core import GRAPH, TREE
from twr.deliveryman import delivery_graph, delivery_tree
from twr.generators import RandomParams, generate_random
from twr.oracle import brute_deliveryman, brute_repairman
from twr.repairman import solve_repairman
from twr.trimming import trim_unit

EPS = Fraction(1, 20)


def survey(count, k):
    rows = {"repairman tree": [], "repairman graph": [], "deliveryman tree": [], "deliveryman graph": []}
    for seed in range(count):
        for kind in (TREE, GRAPH):
            m, reqs = generate_random(seed, RandomParams(kind=kind, request_count=k))
            tr = trim_unit(reqs)
            opt, _ = brute_repairman(m, reqs)
            got = solve_repairman(m, reqs, tr, kind).profit(reqs)
            if opt:
                rows[f"repairman {kind}"].append(opt / got if got else float("inf"))
            speed, _ = brute_deliveryman(m, reqs)
            tour = delivery_tree(m, tr, EPS) if kind == TREE else delivery_graph(m, tr)
            if speed:
                rows[f"deliveryman {kind}"].append(tour.speed / speed)
    return rows


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--count", type=int, default=100)
    ap.add_argument("--requests", type=int, default=6)
    args = ap.parse_args(argv)
    bounds = {"repairman tree": 3, "repairman graph": 3, "deliveryman tree": 4 + EPS, "deliveryman graph": 8}
    print(f"{'solver':<20}{'n':>5}{'worst':>10}{'mean':>10}{'bound':>10}")
    for name, ratios in survey(args.count, args.requests).items():
        if ratios:
            print(f"{name:<20}{len(ratios):>5}{float(max(ratios)):>10.4f}"
                  f"{float(mean(ratios)):>10.4f}{float(bounds[name]):>10.4f}")


if __name__ == "__main__":
    main()
