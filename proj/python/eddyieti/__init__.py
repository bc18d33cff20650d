"""Tree-cotree gauged IETI-DP solver for the eddy current A*-formulation."""

from ._core import (
    ConvergenceError,
    Discretization,
    InputError,
    NonsingularityError,
    SolveStats,
    StepSolution,
    StepSystem,
    UsageError,
    format_csv,
    march,
    monolithic_solve,
    observed_order,
    parse_config,
    parse_csv,
    run_sweep,
)

__all__ = [
    "ConvergenceError",
    "Discretization",
    "InputError",
    "NonsingularityError",
    "SolveStats",
    "StepSolution",
    "StepSystem",
    "UsageError",
    "format_csv",
    "march",
    "monolithic_solve",
    "observed_order",
    "parse_config",
    "parse_csv",
    "run_sweep",
]
