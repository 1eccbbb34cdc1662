from typing import Optional

import numpy as np

from ..lp import LinearProgram
from .highs import solve_highs
from .mps import MPSParseError, read_interchange, write_interchange
from .simplex import SolveReport, SolverError, SolverOptions, solve_simplex


def solve(lp: LinearProgram, options: SolverOptions = SolverOptions(),
          warm_start: Optional[np.ndarray] = None) -> SolveReport:
    """Solve ``lp`` with the embedded simplex (default) or HiGHS."""
    if options.method == "simplex":
        return solve_simplex(lp, options, warm_start)
    if options.method == "highs":
        return solve_highs(lp, options)
    raise ValueError(f"unknown solver method {options.method!r}")


__all__ = [
    "MPSParseError", "SolveReport", "SolverError", "SolverOptions",
    "read_interchange", "solve", "solve_highs", "solve_simplex", "write_interchange",
]
