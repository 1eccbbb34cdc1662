"""Route a LinearProgram through scipy's HiGHS interface."""

from __future__ import annotations

import time

import numpy as np
import scipy.sparse as sp
from scipy.optimize import linprog

from ..lp import LinearProgram
from .simplex import SolveReport, _finish

_STATUS = {0: "optimal", 1: "iteration_limit", 2: "infeasible", 3: "unbounded"}


def solve_highs(lp: LinearProgram, options=None) -> SolveReport:
    start = time.perf_counter()
    A = lp.A.tocsr()
    lo, hi = lp.row_lo, lp.row_hi
    eq = np.flatnonzero(lo == hi)
    ub = np.flatnonzero((lo != hi) & np.isfinite(hi))
    lb = np.flatnonzero((lo != hi) & np.isfinite(lo))
    A_ub = sp.vstack([A[ub], -A[lb]]).tocsr()
    b_ub = np.concatenate([hi[ub], -lo[lb]])
    bounds = np.column_stack([
        np.where(np.isfinite(lp.col_lo), lp.col_lo, -np.inf),
        np.where(np.isfinite(lp.col_hi), lp.col_hi, np.inf),
    ])
    kwargs = dict(
        A_ub=A_ub if A_ub.shape[0] else None,
        b_ub=b_ub if A_ub.shape[0] else None,
        A_eq=A[eq] if eq.size else None,
        b_eq=lo[eq] if eq.size else None,
        bounds=bounds,
        method="highs",
    )
    tol = {"primal_feasibility_tolerance": 1e-9, "dual_feasibility_tolerance": 1e-9}
    res = linprog(lp.c, options=tol, **kwargs)
    if res.status == 2:
        # presolve may report "infeasible or unbounded" as infeasible
        res = linprog(lp.c, options={**tol, "presolve": False}, **kwargs)
    status = _STATUS.get(res.status, "iteration_limit")
    rep = SolveReport(status=status, objective=np.nan, x=None, method="highs",
                      wall_time=time.perf_counter() - start, iterations=int(getattr(res, "nit", 0)))
    if status != "optimal":
        return rep
    y = np.zeros(A.shape[0])
    if eq.size:
        y[eq] = res.eqlin.marginals
    if A_ub.shape[0]:
        mu = res.ineqlin.marginals
        y[ub] += mu[: ub.size]
        y[lb] -= mu[ub.size:]
    rep.x = np.asarray(res.x, dtype=float)
    rep.row_duals = y
    return _finish(lp, rep)
