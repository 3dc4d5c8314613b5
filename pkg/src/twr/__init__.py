"""Exact-rational solvers for time-window repairman and deliveryman problems."""

from .core import (
    INF,
    MetricError,
    MetricInstance,
    ServiceRequest,
    ServiceRun,
    ServiceTour,
    VerifyReport,
    Violation,
    build_metric,
    fixed_order_min_speed,
    service_time_transform,
    verify_run,
)
from .deliveryman import delivery_graph, delivery_tree, mst_chain, test_speed
from .fileio import ParseError, parse_instance, parse_solution, serialize_instance, serialize_solution
from .generators import RandomParams, generate_partition, generate_random
from .multiwindow import delivery_bounded, evaluate_bound12, window12, windowg, windowgd
from .oracle import OracleBudget, brute_deliveryman, brute_path_profile, brute_repairman
from .repairman import ExactPathSolver, WeakenedPathSolver, solve_repairman, sweep_tree
from .trimming import PeriodGrid, TrimmedInstance, racing_tour, trim_general, trim_unit

__all__ = [name for name in dir() if not name.startswith("_")]
