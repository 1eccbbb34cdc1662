"""Evaluation metrics, CVaR tails, ω sweeps and CSV tables."""

from __future__ import annotations

import csv
import logging
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Optional, Sequence

import numpy as np

from .core import (
    FLEX_SETTINGS, INTERPLAY_PAIRS, OMEGA_GRID, FlexibilitySettings, RiskSettings,
)
from .instance import PlanningInstance
from .model import PlanSolution, build, extract
from .solve import SolverOptions, solve

log = logging.getLogger(__name__)

CUM_TOL = 1e-12


def cvar_objective(oc, probs, alpha: float, zeta: float) -> float:
    """zeta + sum_s rho_s max(oc_s - zeta, 0) / (1 - alpha)."""
    oc = np.asarray(oc, dtype=float)
    return float(zeta + np.dot(probs, np.maximum(oc - zeta, 0.0)) / (1.0 - alpha))


def value_at_risk(oc, probs, alpha: float) -> float:
    """Smallest outcome whose cumulative probability reaches alpha.

    This is the smallest minimiser of ``cvar_objective`` over zeta.
    """
    oc = np.asarray(oc, dtype=float)
    probs = np.asarray(probs, dtype=float)
    order = np.argsort(oc, kind="stable")
    cum = np.cumsum(probs[order])
    k = int(np.searchsorted(cum, alpha - CUM_TOL, side="left"))
    return float(oc[order[min(k, oc.size - 1)]])


def cvar_value(oc, probs, alpha: float) -> float:
    """Conditional value at risk of a discrete outcome distribution (costs)."""
    return cvar_objective(oc, probs, alpha, value_at_risk(oc, probs, alpha))


@dataclass(frozen=True)
class TailSet:
    zeta: float
    strict: tuple  # scenario names with oc > zeta
    boundary: tuple  # scenario names with oc == zeta (within tolerance)


def tail_scenarios(sol: PlanSolution, alpha: Optional[float] = None, rtol: float = 1e-9) -> TailSet:
    """Scenarios in the CVaR tail of the solved operating-cost distribution.

    The threshold is the value at risk of ``sol.oc``, i.e. the smallest optimal
    zeta, so membership does not depend on which optimal zeta the solver
    returned.
    """
    alpha = sol.alpha if alpha is None else alpha
    zeta = value_at_risk(sol.oc, sol.probabilities, alpha)
    tol = rtol * max(1.0, abs(zeta))
    strict = tuple(s for s, v in zip(sol.scenario_names, sol.oc) if v > zeta + tol)
    boundary = tuple(s for s, v in zip(sol.scenario_names, sol.oc) if abs(v - zeta) <= tol)
    return TailSet(zeta, strict, boundary)


def ex_post_cost(sol: PlanSolution) -> float:
    """First-stage cost plus the probability-weighted operating cost."""
    return sol.ic + float(np.dot(sol.probabilities, sol.oc))


# ---------------------------------------------------------------------------
# sweep results


@dataclass
class CellResult:
    setting: str
    omega: float
    status: str
    error: str = ""
    ic: float = float("nan")
    expected_oc: float = float("nan")
    cvar: float = float("nan")
    tc: float = float("nan")
    ex_post: float = float("nan")
    investments: dict = field(default_factory=dict)  # (family, asset, node, node2, year) -> MW
    shedding: dict = field(default_factory=dict)  # (node, sector, year) -> expected MWh
    shedding_by_year: dict = field(default_factory=dict)
    lost_load: float = 0.0
    ntc_total: float = 0.0
    psp_total: float = 0.0
    mix: dict = field(default_factory=dict)  # tech -> MW in the last year
    tail: Optional[TailSet] = None
    tail_oc: dict = field(default_factory=dict)  # scenario -> (oc, a_s)
    iterations: int = 0
    wall_time: float = 0.0
    duality_gap: float = float("nan")
    max_infeasibility: float = float("nan")
    clamped: int = 0
    solution: Optional[PlanSolution] = None

    @property
    def ok(self) -> bool:
        return self.status == "optimal"

    @property
    def shedding_total(self) -> float:
        return float(sum(self.shedding.values()))


@dataclass
class ExperimentResult:
    instance: str
    alpha: float
    omegas: tuple
    settings: tuple
    cells: list

    def cell(self, setting: str, omega: float) -> CellResult:
        for c in self.cells:
            if c.setting == setting and c.omega == omega:
                return c
        raise KeyError((setting, omega))

    def series(self, setting: str, attr: str) -> list:
        return [getattr(self.cell(setting, w), attr) for w in self.omegas]

    @property
    def failures(self) -> list:
        return [c for c in self.cells if not c.ok]

    def deltas(self, pairs: Mapping[str, Mapping[str, str]] = INTERPLAY_PAIRS) -> list:
        """Combined-minus-isolated utilisation rows for every pair present."""
        metrics = {"shedding": "shedding_total", "ntc": "ntc_total", "psp": "psp_total"}
        rows = []
        for combined, mapping in pairs.items():
            if combined not in self.settings:
                continue
            for element, isolated in mapping.items():
                if isolated not in self.settings:
                    continue
                attr = metrics[element]
                for w in self.omegas:
                    a, b = self.cell(combined, w), self.cell(isolated, w)
                    va = getattr(a, attr) if a.ok else float("nan")
                    vb = getattr(b, attr) if b.ok else float("nan")
                    rows.append(dict(combined=combined, isolated=isolated, omega=w,
                                     metric=element, combined_value=va, isolated_value=vb,
                                     delta=va - vb))
        return rows

    def write_csv(self, outdir, pairs: Mapping[str, Mapping[str, str]] = INTERPLAY_PAIRS) -> list:
        """Write the result tables; returns the written paths."""
        outdir = Path(outdir)
        outdir.mkdir(parents=True, exist_ok=True)
        tables = {
            "costs.csv": (("setting", "omega", "ic", "expected_oc", "cvar", "tc", "ex_post"),
                          [(c.setting, c.omega, c.ic, c.expected_oc, c.cvar, c.tc, c.ex_post)
                           for c in self.cells]),
            "investments.csv": (("setting", "omega", "asset", "node", "node2", "year", "mw"),
                                [(c.setting, c.omega, k[1], k[2], k[3], k[4], v)
                                 for c in self.cells for k, v in sorted(c.investments.items())]),
            "shedding.csv": (("setting", "omega", "node", "sector", "year", "mwh"),
                             [(c.setting, c.omega, *k, v)
                              for c in self.cells for k, v in sorted(c.shedding.items())]),
            "tails.csv": (("setting", "omega", "scenario", "oc", "a_s"),
                          [(c.setting, c.omega, s, *c.tail_oc[s])
                           for c in self.cells if c.tail is not None for s in c.tail.strict]),
            "deltas.csv": (("combined", "isolated", "omega", "metric", "combined_value",
                            "isolated_value", "delta"),
                           [tuple(r.values()) for r in self.deltas(pairs)]),
            "diagnostics.csv": (("setting", "omega", "status", "iterations", "duality_gap",
                                 "max_infeasibility", "lost_load_mwh", "clamped", "zeta",
                                 "tail_boundary", "error"),
                                [(c.setting, c.omega, c.status, c.iterations, c.duality_gap,
                                  c.max_infeasibility, c.lost_load, c.clamped,
                                  c.tail.zeta if c.tail else float("nan"),
                                  ";".join(c.tail.boundary) if c.tail else "", c.error)
                                 for c in self.cells]),
        }
        written = []
        for fname, (header, rows) in tables.items():
            path = outdir / fname
            with open(path, "w", encoding="utf-8", newline="") as fh:
                w = csv.writer(fh, lineterminator="\n")
                w.writerow(header)
                for row in rows:
                    w.writerow([_fmt(v) for v in row])
            written.append(path)
        return written


def _fmt(v) -> str:
    if isinstance(v, (float, np.floating)):
        v = float(v)
        if v == 0.0:
            v = 0.0  # drop the sign of negative zero
        return repr(v)
    return str(v)


def summarize(setting: str, sol: PlanSolution, instance: PlanningInstance, rep=None) -> CellResult:
    """Aggregate one solved model into a CellResult."""
    last = instance.years[-1]
    pos = {s: i for i, s in enumerate(sol.scenario_names)}
    inv = {}
    mix, ntc, psp = {}, 0.0, 0.0
    link_nodes = {ic.name: (ic.source, ic.target) for ic in instance.interconnectors}
    for key, v in sol.investments.items():
        v = v + 0.0
        fam = key[0]
        if fam == "y":
            src, dst = link_nodes[key[1]]
            inv[("y", "ntc", src, dst, key[2])] = v
            if key[2] == last:
                ntc += v
        else:
            inv[(fam, key[1], key[2], "", key[3])] = v
            if key[3] == last:
                if fam == "z":
                    psp += v
                else:
                    mix[key[1]] = mix.get(key[1], 0.0) + v
    shed, by_year = {}, {}
    for key, v in sol.dispatch.items():
        if key[0] != "shed" or v == 0.0:
            continue
        _, sector, node, t, year, s = key
        e = sol.probabilities[pos[s]] * instance.hours[t].weight * v
        shed[(node, sector, year)] = shed.get((node, sector, year), 0.0) + e
        by_year[year] = by_year.get(year, 0.0) + e
    tail = tail_scenarios(sol) if sol.a is not None else None
    tail_oc = {}
    if tail is not None:
        tail_oc = {s: (float(sol.oc[pos[s]]), float(sol.a[pos[s]])) for s in tail.strict}
    cell = CellResult(
        setting=setting, omega=sol.omega, status=sol.status, ic=sol.ic,
        expected_oc=sol.expected_oc, cvar=sol.cvar, tc=sol.objective, ex_post=ex_post_cost(sol),
        investments=inv, shedding=shed, shedding_by_year=by_year, lost_load=sol.lost_load,
        ntc_total=ntc, psp_total=psp, mix=mix, tail=tail, tail_oc=tail_oc,
        iterations=sol.iterations, clamped=instance.scenarios.clamped, solution=sol,
    )
    if rep is not None:
        cell.duality_gap = rep.duality_gap
        cell.max_infeasibility = rep.max_infeasibility
        cell.wall_time = rep.wall_time
    return cell


def _resolve(settings) -> dict:
    if settings is None:
        return {"dr-none": FLEX_SETTINGS["dr-none"]}
    if isinstance(settings, Mapping):
        return dict(settings)
    out = {}
    for name in settings:
        if name not in FLEX_SETTINGS:
            raise KeyError(f"unknown flexibility setting {name!r}; known: {sorted(FLEX_SETTINGS)}")
        out[name] = FLEX_SETTINGS[name]
    return out


def sweep(instance: PlanningInstance, omegas: Sequence[float] = OMEGA_GRID, settings=None,
          alpha: float = 0.9, options: SolverOptions = SolverOptions(),
          warm_start: bool = True, lp_hook=None) -> ExperimentResult:
    """One solve per (setting, omega); failed cells are recorded and skipped.

    ``settings`` is a list of named settings or a mapping name -> FlexibilitySettings.
    Within a setting, each solve starts from the previous optimal basis.
    ``lp_hook(setting, omega, lp)`` is called after every build.
    """
    resolved = _resolve(settings)
    omegas = tuple(float(w) for w in omegas)
    cells = []
    for name, flex in resolved.items():
        if not isinstance(flex, FlexibilitySettings):
            raise TypeError(f"setting {name!r} is not a FlexibilitySettings")
        basis = None
        for w in omegas:
            start = time.perf_counter()
            try:
                lp = build(instance, RiskSettings(omega=w, alpha=alpha), flex)
                if lp_hook is not None:
                    lp_hook(name, w, lp)
                rep = solve(lp, options, basis if warm_start else None)
                if not rep.optimal:
                    raise RuntimeError(f"solver status {rep.status}")
                sol = extract(lp, rep.x, duals=rep.row_duals, status=rep.status,
                              iterations=rep.iterations, basis=rep.basis)
                cell = summarize(name, sol, instance, rep)
                basis = rep.basis
            except Exception as exc:  # recorded per cell; the sweep goes on
                log.warning("sweep cell (%s, %g) failed: %s", name, w, exc)
                cell = CellResult(setting=name, omega=w, status="failed", error=str(exc))
                basis = None
            cell.wall_time = time.perf_counter() - start
            log.info("%s omega=%g %s in %.2fs", name, w, cell.status, cell.wall_time)
            cells.append(cell)
    return ExperimentResult(instance=instance.name, alpha=alpha, omegas=omegas,
                            settings=tuple(resolved), cells=cells)
