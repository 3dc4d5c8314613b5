from fractions import Fraction
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

from twr.core import GRAPH, TREE, build_metric
from twr.generators import RandomParams, generate_random

settings.register_profile(
    "default",
    max_examples=40,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")

MALFORMED_DIR = Path(__file__).parent / "data" / "malformed"

# (criterion number, PASS/FAIL line), filled by test_acceptance
acceptance_results = []


def pytest_terminal_summary(terminalreporter):
    if acceptance_results:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(acceptance_results):
            terminalreporter.write_line(line)


def random_instance(seed, kind=TREE, nodes=6, requests=6, lo=1, hi=1, max_weight=4, horizon=3):
    params = RandomParams(
        node_count=nodes,
        kind=kind,
        request_count=requests,
        length_lo=Fraction(lo),
        length_hi=Fraction(hi),
        horizon=Fraction(horizon),
        max_weight=max_weight,
    )
    return generate_random(seed, params)


@pytest.fixture
def path3():
    """Path 0-1-2 with weights 1 and 2."""
    return build_metric(3, TREE, [(0, 1, 1), (1, 2, 2)])


@pytest.fixture
def unit_triangle():
    return build_metric(3, GRAPH, [(0, 1, 1), (1, 2, 1), (0, 2, 1)])
