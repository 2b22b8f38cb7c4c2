"""Branch-and-bound over decision diagrams with an expansion-threshold cache.

The solver alternates restricted diagrams (feasible solutions, incumbent
updates) and relaxed diagrams (bounds, exact cutsets to branch on), sharing a
cache of expansion thresholds that prunes dominated and useless subproblems
across iterations.
"""

from .model import INF, NEG_INF, Problem, Relaxation, Sense, to_maximization
from .diagram import (CompileTimeout, Diagram, FRONTIER, LAST_EXACT_LAYER,
                      Node, RELAXED, RESTRICTED, compile_diagram,
                      extract_cutset)
from .bounds import combined_bound, compute_local_bounds
from .cache import ExpansionCache, compute_thresholds
from .solver import (OPTIMAL, TIME_LIMIT, SolveResult, SolveStats,
                     SolverConfig, solve)

__version__ = "0.1.0"

__all__ = [
    "CompileTimeout",
    "Diagram",
    "ExpansionCache",
    "FRONTIER",
    "INF",
    "LAST_EXACT_LAYER",
    "NEG_INF",
    "Node",
    "OPTIMAL",
    "Problem",
    "RELAXED",
    "RESTRICTED",
    "Relaxation",
    "Sense",
    "SolveResult",
    "SolveStats",
    "SolverConfig",
    "TIME_LIMIT",
    "combined_bound",
    "compile_diagram",
    "compute_local_bounds",
    "compute_thresholds",
    "extract_cutset",
    "solve",
    "to_maximization",
]
