"""Sparse LP in bounded form: minimise c @ v subject to row_lo <= A @ v <= row_hi
and col_lo <= v <= col_hi."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Any, Optional

import numpy as np
import scipy.sparse as sp


def _ro(a) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class LinearProgram:
    c: np.ndarray
    A: sp.csr_matrix
    row_lo: np.ndarray
    row_hi: np.ndarray
    col_lo: np.ndarray
    col_hi: np.ndarray
    col_names: tuple
    row_names: tuple
    offset: float = 0.0
    name: str = "LP"
    meta: Optional[Any] = field(default=None, repr=False)  # model context, never serialised

    def __post_init__(self):
        n = len(self.col_names)
        m = len(self.row_names)
        A = sp.csr_matrix(self.A, dtype=float, shape=(m, n), copy=True)
        A.sum_duplicates()
        A.eliminate_zeros()
        A.sort_indices()
        for arr in (A.data, A.indices, A.indptr):
            arr.setflags(write=False)
        object.__setattr__(self, "A", A)
        for name in ("c", "col_lo", "col_hi"):
            v = _ro(getattr(self, name))
            if v.shape != (n,):
                raise ValueError(f"{name} has shape {v.shape}, expected ({n},)")
            object.__setattr__(self, name, v)
        for name in ("row_lo", "row_hi"):
            v = _ro(getattr(self, name))
            if v.shape != (m,):
                raise ValueError(f"{name} has shape {v.shape}, expected ({m},)")
            object.__setattr__(self, name, v)
        object.__setattr__(self, "col_names", tuple(self.col_names))
        object.__setattr__(self, "row_names", tuple(self.row_names))
        if len(set(self.row_names)) != m:
            raise ValueError("row names must be unique")
        if len(set(self.col_names)) != n:
            raise ValueError("column names must be unique")
        if np.any(self.col_lo > self.col_hi) or np.any(self.row_lo > self.row_hi):
            raise ValueError("a lower bound exceeds its upper bound")

    @property
    def shape(self):
        return self.A.shape

    @property
    def nnz(self) -> int:
        return self.A.nnz

    def column(self, name: str) -> int:
        index = self.__dict__.get("_col_index")
        if index is None:
            index = {k: i for i, k in enumerate(self.col_names)}
            object.__setattr__(self, "_col_index", index)
        return index[name]

    def row(self, name: str) -> int:
        index = self.__dict__.get("_row_index")
        if index is None:
            index = {k: i for i, k in enumerate(self.row_names)}
            object.__setattr__(self, "_row_index", index)
        return index[name]

    def objective(self, v) -> float:
        return float(self.c @ np.asarray(v, dtype=float)) + self.offset

    def max_violation(self, v) -> float:
        """Largest bound violation of ``v``.

        Row residuals are scaled by max(1, |bound|, sum_j |a_ij v_j|) so that
        cancellation in rows with large terms and a zero right-hand side is not
        mistaken for infeasibility; column residuals by max(1, |bound|).
        """
        v = np.asarray(v, dtype=float)
        act = self.A @ v
        mag = abs(self.A) @ np.abs(v)
        worst = 0.0
        for val, lo, hi, size in ((act, self.row_lo, self.row_hi, mag),
                                  (v, self.col_lo, self.col_hi, 0.0)):
            with np.errstate(invalid="ignore"):
                below = np.where(np.isfinite(lo), (lo - val) / np.maximum(np.maximum(1.0, np.abs(lo)), size), 0.0)
                above = np.where(np.isfinite(hi), (val - hi) / np.maximum(np.maximum(1.0, np.abs(hi)), size), 0.0)
            if val.size:
                worst = max(worst, float(below.max()), float(above.max()))
        return worst

    def with_bounds(self, col_lo=None, col_hi=None) -> "LinearProgram":
        return replace(
            self,
            col_lo=self.col_lo if col_lo is None else col_lo,
            col_hi=self.col_hi if col_hi is None else col_hi,
        )

    def without(self, cols=(), rows=()) -> "LinearProgram":
        """Drop columns and rows by index."""
        keep_c = np.setdiff1d(np.arange(self.shape[1]), np.asarray(cols, dtype=int))
        keep_r = np.setdiff1d(np.arange(self.shape[0]), np.asarray(rows, dtype=int))
        return LinearProgram(
            c=self.c[keep_c], A=self.A[keep_r][:, keep_c],
            row_lo=self.row_lo[keep_r], row_hi=self.row_hi[keep_r],
            col_lo=self.col_lo[keep_c], col_hi=self.col_hi[keep_c],
            col_names=[self.col_names[i] for i in keep_c],
            row_names=[self.row_names[i] for i in keep_r],
            offset=self.offset, name=self.name,
        )


class LPBuilder:
    """Accumulates columns and rows in emission order."""

    def __init__(self, name: str = "LP"):
        self.name = name
        self.keys = []
        self.index = {}
        self.c = []
        self.lo = []
        self.hi = []
        self.row_names = []
        self.row_lo = []
        self.row_hi = []
        self._ri = []
        self._ci = []
        self._v = []

    def var(self, key, lo=0.0, hi=np.inf, cost=0.0) -> int:
        if key in self.index:
            raise ValueError(f"duplicate variable {key!r}")
        j = len(self.keys)
        self.keys.append(key)
        self.index[key] = j
        self.c.append(cost)
        self.lo.append(lo)
        self.hi.append(hi)
        return j

    def add_cost(self, j: int, cost: float):
        self.c[j] += cost

    def row(self, label, terms, lo=-np.inf, hi=np.inf) -> int:
        i = len(self.row_names)
        self.row_names.append(label)
        self.row_lo.append(lo)
        self.row_hi.append(hi)
        for j, a in terms:
            if a != 0.0:
                self._ri.append(i)
                self._ci.append(j)
                self._v.append(a)
        return i

    def build(self, names=None, meta=None) -> LinearProgram:
        m, n = len(self.row_names), len(self.keys)
        A = sp.coo_matrix((self._v, (self._ri, self._ci)), shape=(m, n)).tocsr()
        return LinearProgram(
            c=self.c, A=A, row_lo=self.row_lo, row_hi=self.row_hi,
            col_lo=self.lo, col_hi=self.hi,
            col_names=names if names is not None else [str(k) for k in self.keys],
            row_names=self.row_names, name=self.name, meta=meta,
        )
