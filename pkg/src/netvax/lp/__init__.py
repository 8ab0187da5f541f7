"""Linear-programming toolkit: model construction, solving, and rounding."""

from .model import (
    EQUAL,
    GREATER_EQUAL,
    LESS_EQUAL,
    LinearConstraint,
    LpModel,
    LpSolution,
    build_model,
    verify_solution,
    write_lp_file,
)
from .rounding import round_irp, round_tkr
from .simplex import SimplexResult, solve_simplex
from .solve import DEFAULT_NODE_CAP, ENGINES, solve, solve_blp

__all__ = [
    "EQUAL",
    "GREATER_EQUAL",
    "LESS_EQUAL",
    "LinearConstraint",
    "LpModel",
    "LpSolution",
    "build_model",
    "verify_solution",
    "write_lp_file",
    "round_irp",
    "round_tkr",
    "SimplexResult",
    "solve_simplex",
    "DEFAULT_NODE_CAP",
    "ENGINES",
    "solve",
    "solve_blp",
]
