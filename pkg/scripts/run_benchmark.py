"""Run a benchmark suite against the exact oracles and print the report.

    python3 scripts/run_benchmark.py [suite.json] [--workers N] [--csv] [--times]

Defaults to scripts/default_suite.json. Exit status is 1 if any row fails.
"""
import argparse
import sys
from pathlib import Path

from twr.bench import run_benchmark


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("suite", nargs="?", default=str(Path(__file__).with_name("default_suite.json")))
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--csv", action="store_true")
    ap.add_argument("--times", action="store_true")
    args = ap.parse_args(argv)
    report = run_benchmark(Path(args.suite).read_text(), workers=args.workers)
    print(report.to_csv(args.times) if args.csv else report.to_text(args.times), end="")
    return 0 if report.ok else 1


if __name__ == "__main__":
    sys.exit(main())
