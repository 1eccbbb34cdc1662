"""Bounded-variable revised primal simplex.

The LP ``row_lo <= A v <= row_hi, col_lo <= v <= col_hi`` is put in the
computational form ``[A  -I] [v; s] = 0`` with one logical ``s`` per row that
carries the row bounds. The slack basis is always a valid start. Phase 1
minimises the sum of bound infeasibilities of the basic variables, phase 2 the
objective; both share the same pricing and ratio-test code.

The basis inverse is a sparse LU factorisation (SuperLU) followed by a product
form eta file, refactorised every ``refactor_every`` pivots.
"""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass
from typing import Optional

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import splu

from ..lp import LinearProgram

log = logging.getLogger(__name__)

BASIC, AT_LOWER, AT_UPPER, FREE_ZERO, FIXED = 0, 1, 2, 3, 4


@dataclass(frozen=True)
class SolverOptions:
    method: str = "simplex"  # "simplex" or "highs"
    max_iter: int = 200_000
    feas_tol: float = 1e-9
    opt_tol: float = 1e-9
    pivot_tol: float = 1e-9
    refactor_every: int = 32
    scale: bool = True
    bland_after: int = 300  # consecutive degenerate pivots before Bland's rule
    time_limit: Optional[float] = None


@dataclass(eq=False)
class SolveReport:
    status: str  # optimal | infeasible | unbounded | iteration_limit
    objective: float
    x: Optional[np.ndarray]
    row_duals: Optional[np.ndarray] = None
    reduced_costs: Optional[np.ndarray] = None
    iterations: int = 0
    wall_time: float = 0.0
    basis: Optional[np.ndarray] = None  # status code per column then per row
    certificate: Optional[np.ndarray] = None  # Farkas row multipliers or unbounded ray
    dual_objective: float = np.nan
    max_infeasibility: float = np.nan
    max_complementarity: float = np.nan
    method: str = "simplex"

    @property
    def optimal(self) -> bool:
        return self.status == "optimal"

    @property
    def duality_gap(self) -> float:
        scale = max(1.0, abs(self.objective))
        return abs(self.objective - self.dual_objective) / scale


class SolverError(RuntimeError):
    pass


# scaling --------------------------------------------------------------------

def _row_extremes(M: sp.csr_matrix):
    """Max and min absolute nonzero per row (1 for empty rows)."""
    m = M.shape[0]
    hi = np.ones(m)
    lo = np.ones(m)
    counts = np.diff(M.indptr)
    nz = counts > 0
    if M.nnz:
        data = np.abs(M.data)
        starts = M.indptr[:-1][nz]
        hi[nz] = np.maximum.reduceat(data, starts)
        lo[nz] = np.minimum.reduceat(data, starts)
    return hi, lo


def geometric_scaling(A: sp.csr_matrix, passes: int = 6):
    """Row and column factors r, s so that diag(r) A diag(s) has entries near 1."""
    m, n = A.shape
    r = np.ones(m)
    s = np.ones(n)
    M = abs(A).tocsr()
    for _ in range(passes):
        S = sp.diags(r) @ M @ sp.diags(s)
        hi, lo = _row_extremes(S.tocsr())
        r /= np.sqrt(hi * lo)
        S = (sp.diags(r) @ M @ sp.diags(s)).tocsc()
        hi, lo = _row_extremes(S.T.tocsr())
        s /= np.sqrt(hi * lo)
    # round to powers of two so scaling itself is exact
    r = np.exp2(np.round(np.log2(r)))
    s = np.exp2(np.round(np.log2(s)))
    return r, s


# basis factorisation --------------------------------------------------------

class _Factor:
    def __init__(self, M: sp.csc_matrix, basis: np.ndarray):
        B = M[:, basis].tocsc()
        try:
            self.lu = splu(B, permc_spec="COLAMD", options={"SymmetricMode": False})
        except RuntimeError as exc:
            raise SolverError(f"singular basis: {exc}") from exc
        self.etas = []

    def ftran(self, v: np.ndarray) -> np.ndarray:
        w = self.lu.solve(v)
        for r, a in self.etas:
            wr = w[r] / a[r]
            w -= wr * a
            w[r] = wr
        return w

    def btran(self, c: np.ndarray) -> np.ndarray:
        w = np.array(c, dtype=float)
        for r, a in reversed(self.etas):
            w[r] = (w[r] - (a @ w - a[r] * w[r])) / a[r]
        return self.lu.solve(w, trans="T")


# main solver ----------------------------------------------------------------

class _Simplex:
    def __init__(self, lp: LinearProgram, opts: SolverOptions):
        self.opts = opts
        A = lp.A.tocsr()
        m, n = A.shape
        self.m, self.n = m, n
        if opts.scale and A.nnz:
            r, s = geometric_scaling(A)
        else:
            r, s = np.ones(m), np.ones(n)
        self.r, self.s = r, s
        As = (sp.diags(r) @ A @ sp.diags(s)).tocsc()
        c = lp.c * s
        self.kappa = float(np.max(np.abs(c))) if c.size and np.any(c) else 1.0
        self.c = np.concatenate([c / self.kappa, np.zeros(m)])
        self.lo = np.concatenate([lp.col_lo / s, lp.row_lo * r])
        self.hi = np.concatenate([lp.col_hi / s, lp.row_hi * r])
        self.M = sp.hstack([As, -sp.eye(m, format="csc")], format="csc")
        self.MT = self.M.T.tocsr()
        self.N = n + m

    # column helpers
    def column(self, j: int) -> np.ndarray:
        col = np.zeros(self.m)
        M = self.M
        lo, hi = M.indptr[j], M.indptr[j + 1]
        col[M.indices[lo:hi]] = M.data[lo:hi]
        return col

    def initial_state(self, warm: Optional[np.ndarray]):
        lo, hi = self.lo, self.hi
        state = np.full(self.N, AT_LOWER, dtype=np.int8)
        fin_lo, fin_hi = np.isfinite(lo), np.isfinite(hi)
        state[~fin_lo & fin_hi] = AT_UPPER
        state[~fin_lo & ~fin_hi] = FREE_ZERO
        state[fin_lo & fin_hi & (lo == hi)] = FIXED
        if warm is not None and warm.shape == (self.N,) and np.count_nonzero(warm == BASIC) == self.m:
            w = warm.astype(np.int8).copy()
            # re-derive nonbasic positions against current bounds
            nb = w != BASIC
            w[nb & (w == AT_UPPER) & ~fin_hi] = state[nb & (w == AT_UPPER) & ~fin_hi]
            w[nb & (w == AT_LOWER) & ~fin_lo] = state[nb & (w == AT_LOWER) & ~fin_lo]
            w[nb & (state == FIXED)] = FIXED
            w[nb & (state == FREE_ZERO)] = FREE_ZERO
            w[nb & (w == FIXED) & (state != FIXED)] = state[nb & (w == FIXED) & (state != FIXED)]
            w[nb & (w == FREE_ZERO) & (state != FREE_ZERO)] = state[nb & (w == FREE_ZERO) & (state != FREE_ZERO)]
            basis = np.flatnonzero(w == BASIC)
            try:
                _Factor(self.M, basis)
                return w, basis
            except SolverError:
                log.debug("warm-start basis is singular; falling back to slack basis")
        state[self.n:][state[self.n:] == BASIC] = AT_LOWER
        basis = np.arange(self.n, self.N)
        state[basis] = BASIC
        return state, basis

    def nonbasic_values(self, state):
        x = np.zeros(self.N)
        x = np.where(state == AT_LOWER, self.lo, x)
        x = np.where(state == AT_UPPER, self.hi, x)
        x = np.where(state == FIXED, self.lo, x)
        x[state == BASIC] = 0.0
        return x

    def recompute_basics(self, factor, basis, state, x):
        xn = np.where(state == BASIC, 0.0, x)
        x[basis] = factor.ftran(-(self.M @ xn))

    def run(self, warm=None):
        opts = self.opts
        ftol, otol, ptol = opts.feas_tol, opts.opt_tol, opts.pivot_tol
        start = time.perf_counter()
        state, basis = self.initial_state(warm)
        basis = np.sort(basis)
        x = self.nonbasic_values(state)
        factor = _Factor(self.M, basis)
        self.recompute_basics(factor, basis, state, x)

        it = 0
        degenerate = 0
        bland = False
        final_checks = 0
        lo, hi = self.lo, self.hi
        y = np.zeros(self.m)
        phase1 = True
        # Devex reference weights; in phase 2 d is updated from the pivot row
        weights = np.ones(self.N)
        d = None
        d_fresh = False
        was_phase1 = None
        while True:
            if it >= opts.max_iter or (
                opts.time_limit is not None and time.perf_counter() - start > opts.time_limit
            ):
                return self._report("iteration_limit", state, basis, x, y, it, start, factor)
            xb = x[basis]
            lb, ub = lo[basis], hi[basis]
            below = xb < lb - ftol
            above = xb > ub + ftol
            phase1 = bool(below.any() or above.any())
            if phase1 != was_phase1:
                weights[:] = 1.0
                was_phase1 = phase1
                d_fresh = False
            if phase1:
                cb = np.where(below, -1.0, np.where(above, 1.0, 0.0))
                y = factor.btran(cb)
                d = -(self.MT @ y)
                d_fresh = False
            elif not d_fresh:
                y = factor.btran(self.c[basis])
                d = self.c - self.MT @ y
                d_fresh = True
            d[basis] = 0.0

            can_inc = (state == AT_LOWER) | (state == FREE_ZERO)
            can_dec = (state == AT_UPPER) | (state == FREE_ZERO)
            viol = np.where(can_inc & (d < -otol), -d, 0.0) + np.where(can_dec & (d > otol), d, 0.0)
            if bland:
                cand = np.flatnonzero(viol > 0)
                j = int(cand[0]) if cand.size else -1
            else:
                j = int(np.argmax(viol * viol / weights)) if viol.size else -1
                if j >= 0 and viol[j] <= 0:
                    j = -1

            if j < 0:
                # confirm on a fresh factorisation before declaring termination
                d_fresh = False
                basis = np.sort(basis)
                factor = _Factor(self.M, basis)
                x = np.where(state == BASIC, 0.0, x)
                x[state != BASIC] = self.nonbasic_values(state)[state != BASIC]
                self.recompute_basics(factor, basis, state, x)
                final_checks += 1
                xb = x[basis]
                still_infeasible = bool(np.any(xb < lo[basis] - ftol) or np.any(xb > hi[basis] + ftol))
                if still_infeasible != phase1 and final_checks < 5:
                    continue
                if phase1:
                    return self._report("infeasible", state, basis, x, y, it, start, factor,
                                        certificate=y)
                y2 = factor.btran(self.c[basis])
                d2 = self.c - self.MT @ y2
                d2[basis] = 0.0
                viol2 = np.where(can_inc & (d2 < -otol), -d2, 0.0) + np.where(can_dec & (d2 > otol), d2, 0.0)
                if np.any(viol2 > 0) and final_checks < 5:
                    continue
                return self._report("optimal", state, basis, x, y2, it, start, factor)

            direction = 1.0 if d[j] < 0 else -1.0
            alpha = factor.ftran(self.column(j))
            delta = -direction * alpha  # change of x_B per unit step

            # bound each basic variable may not cross
            xb = x[basis]
            lb, ub = lo[basis], hi[basis]
            below = xb < lb - ftol
            above = xb > ub + ftol
            up = delta > ptol
            down = delta < -ptol
            target = np.full(self.m, np.nan)
            # feasible basics stop at the bound they move toward
            target = np.where(up & ~below & ~above, ub, target)
            target = np.where(down & ~below & ~above, lb, target)
            # infeasible basics stop where they first become feasible
            target = np.where(up & below, lb, target)
            target = np.where(down & above, ub, target)
            limited = np.isfinite(target)

            theta_flip = hi[j] - lo[j]
            r = -1
            theta = np.inf
            if limited.any():
                idx = np.flatnonzero(limited)
                dist = np.where(delta[idx] > 0, target[idx] - xb[idx], xb[idx] - target[idx])
                rate = np.abs(delta[idx])
                exact = dist / rate
                if bland:
                    tmin = exact.min()
                    ties = idx[exact <= tmin + 1e-12 * max(1.0, tmin)]
                    r = int(ties[np.argmin(basis[ties])])
                    theta = float(max(exact[idx == r][0], 0.0))
                else:
                    relaxed = (dist + ftol) / rate
                    tmax = relaxed.min()
                    ok = exact <= tmax
                    pick = np.flatnonzero(ok)
                    k = pick[np.argmax(rate[pick])]
                    r = int(idx[k])
                    theta = float(max(exact[k], 0.0))

            if theta_flip <= theta:
                if not np.isfinite(theta_flip):
                    if phase1:
                        raise SolverError("unbounded phase-1 step; numerical trouble")
                    ray = np.zeros(self.N)
                    ray[j] = direction
                    ray[basis] = delta
                    return self._report("unbounded", state, basis, x, y, it, start, factor,
                                        certificate=ray)
                # bound flip, basis unchanged
                x[basis] += theta_flip * delta
                if direction > 0:
                    x[j] = hi[j]
                    state[j] = AT_UPPER
                else:
                    x[j] = lo[j]
                    state[j] = AT_LOWER
                step = theta_flip
            else:
                leaving = int(basis[r])
                e_r = np.zeros(self.m)
                e_r[r] = 1.0
                row = self.MT @ factor.btran(e_r)
                a_rq = row[j]
                if abs(a_rq) < ptol or abs(a_rq - alpha[r]) > 1e-7 * (1.0 + abs(alpha[r])):
                    a_rq = alpha[r]
                    d_fresh = False
                wq = weights[j]
                np.maximum(weights, (row / a_rq) ** 2 * wq, out=weights)
                weights[leaving] = max(wq / (a_rq * a_rq), 1.0)
                if weights.max() > 1e8:
                    weights[:] = 1.0
                if d_fresh:
                    dq = d[j]
                    d -= (dq / a_rq) * row
                    d[leaving] = -dq / a_rq
                    d[j] = 0.0
                x[basis] += theta * delta
                x[j] += direction * theta
                tgt = target[r]
                x[leaving] = tgt
                if lo[leaving] == hi[leaving]:
                    state[leaving] = FIXED
                elif tgt == lo[leaving]:
                    state[leaving] = AT_LOWER
                else:
                    state[leaving] = AT_UPPER
                state[j] = BASIC
                basis[r] = j
                factor.etas.append((r, alpha))
                step = theta
                if len(factor.etas) >= opts.refactor_every:
                    order = np.argsort(basis)
                    basis = basis[order]
                    factor = _Factor(self.M, basis)
                    self.recompute_basics(factor, basis, state, x)
                    d_fresh = False
            it += 1

            if step * abs(d[j]) <= 1e-12:
                degenerate += 1
                if degenerate > opts.bland_after and not bland:
                    log.debug("switching to Bland's rule after %d degenerate pivots", degenerate)
                    bland = True
            else:
                degenerate = 0
                bland = False

    def _report(self, status, state, basis, x, y, it, start, factor, certificate=None):
        n = self.n
        s = self.s
        r = self.r
        xs = x[:n] * s
        duals = self.kappa * r * y
        basis_status = state.copy()
        cert = None
        if certificate is not None:
            if status == "infeasible":
                cert = r * certificate
            else:
                cert = certificate[:n] * s
        rep = SolveReport(
            status=status,
            objective=np.nan,
            x=xs if status in ("optimal", "iteration_limit") else None,
            row_duals=duals if status == "optimal" else None,
            iterations=it,
            wall_time=time.perf_counter() - start,
            basis=basis_status,
            certificate=cert,
        )
        return rep


def _finish(lp: LinearProgram, rep: SolveReport) -> SolveReport:
    """Objective, reduced costs, dual objective and KKT residuals in original units."""
    if rep.x is None:
        return rep
    x = rep.x
    rep.objective = lp.objective(x)
    rep.max_infeasibility = lp.max_violation(x)
    if rep.row_duals is None:
        return rep
    y = rep.row_duals
    d = lp.c - lp.A.T @ y
    rep.reduced_costs = d
    act = lp.A @ x
    scale = max(1.0, float(np.max(np.abs(lp.c))) if lp.c.size else 1.0)
    tiny = 1e-9 * scale

    def side_value(mult, lo, hi, val):
        # value of the bound a multiplier prices; fall back to the activity when
        # the multiplier is numerically zero or the bound is infinite
        out = np.where(mult > 0, lo, hi)
        bad = (np.abs(mult) <= tiny) | ~np.isfinite(out)
        return np.where(bad, val, out)

    yb = side_value(y, lp.row_lo, lp.row_hi, act)
    db = side_value(d, lp.col_lo, lp.col_hi, x)
    # y.(A x) + d.x == c.x identically; substituting the priced bounds gives the dual objective
    rep.dual_objective = float(y @ yb + d @ db) + lp.offset
    comp_rows = np.abs(y) * np.abs(act - yb)
    comp_cols = np.abs(d) * np.abs(x - db)
    rep.max_complementarity = float(
        max(comp_rows.max(initial=0.0), comp_cols.max(initial=0.0)) / max(1.0, abs(rep.objective))
    )
    return rep


def solve_simplex(lp: LinearProgram, options: SolverOptions = SolverOptions(),
                  warm_start: Optional[np.ndarray] = None) -> SolveReport:
    m, n = lp.shape
    # drop empty rows; each must admit a zero activity
    counts = np.diff(lp.A.indptr)
    empty = np.flatnonzero(counts == 0)
    if empty.size:
        ok = (lp.row_lo[empty] <= 0) & (lp.row_hi[empty] >= 0)
        if not np.all(ok):
            cert = np.zeros(m)
            cert[empty[~ok][0]] = 1.0
            return SolveReport("infeasible", np.nan, None, certificate=cert)
    keep = np.flatnonzero(counts > 0)
    if keep.size < m:
        reduced = LinearProgram(
            c=lp.c, A=lp.A[keep], row_lo=lp.row_lo[keep], row_hi=lp.row_hi[keep],
            col_lo=lp.col_lo, col_hi=lp.col_hi, col_names=lp.col_names,
            row_names=[lp.row_names[i] for i in keep], offset=lp.offset,
        )
        warm = None
        if warm_start is not None and warm_start.shape == (n + m,):
            warm = np.concatenate([warm_start[:n], warm_start[n:][keep]])
        rep = solve_simplex(reduced, options, warm)
        full_duals = None
        if rep.row_duals is not None:
            full_duals = np.zeros(m)
            full_duals[keep] = rep.row_duals
        basis = None
        if rep.basis is not None:
            basis = np.concatenate([rep.basis[:n], np.full(m, AT_LOWER, dtype=np.int8)])
            basis[n + keep] = rep.basis[n:]
        cert = rep.certificate
        if rep.status == "infeasible" and cert is not None:
            cert = np.zeros(m)
            cert[keep] = rep.certificate
        rep.row_duals, rep.basis, rep.certificate = full_duals, basis, cert
        return _finish(lp, rep)

    if m == 0:
        # only bounds: each column sits at its cheaper finite bound
        x = np.where(lp.c > 0, lp.col_lo, np.where(lp.c < 0, lp.col_hi, np.clip(0.0, lp.col_lo, lp.col_hi)))
        if not np.all(np.isfinite(x)):
            ray = np.where(np.isfinite(x), 0.0, -np.sign(lp.c))
            return SolveReport("unbounded", -np.inf, None, certificate=ray)
        rep = SolveReport("optimal", np.nan, x, row_duals=np.zeros(0),
                          basis=np.where(x == lp.col_lo, AT_LOWER, AT_UPPER).astype(np.int8))
        return _finish(lp, rep)

    engine = _Simplex(lp, options)
    rep = engine.run(warm_start)
    if rep.status == "unbounded":
        rep.objective = -np.inf
    return _finish(lp, rep)
