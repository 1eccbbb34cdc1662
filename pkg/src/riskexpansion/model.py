"""Deterministic equivalent of the two-stage, CVaR-weighted expansion problem.

Variable keys are tuples whose first element names the family:

=========  ==========================================  ========
family     index                                       unit
=========  ==========================================  ========
x          (tech, node, year)                          MW
y          (link, year)                                MW
z          (psp, node, year)                           MW
g          (tech, node, hour, year, scenario)          MWh
flow       (link, hour, year, scenario)                MWh
pump       (psp, node, hour, year, scenario)           MWh
sl         (psp, node, hour, year, scenario)           MWh
shed       (sector, node, hour, year, scenario)        MWh
ll         (node, hour, year, scenario)                MWh
oc, a      (scenario,)                                 EUR
zeta,cvar  ()                                          EUR
=========  ==========================================  ========

Investment variables are cumulative capacity added by each year and each
modelled year is charged the full discounted annuity. Hourly energy terms in
the operating cost are multiplied by the hour weight. Capacity limits that do
not involve an investment variable become plain column bounds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Optional

import numpy as np

from .core import (
    FlexibilitySettings, RiskSettings, TechKind, annuity, discount_factor, marginal_cost,
)
from .demand import SheddingMeritOrder, build_merit_order
from .instance import PlanningInstance
from .lp import LinearProgram, LPBuilder

INVESTMENT_FAMILIES = ("x", "y", "z")


class IntegrityError(RuntimeError):
    """A reported solution violates its own model beyond tolerance."""


def key_name(key: tuple) -> str:
    family, *rest = key
    return f"{family}[{','.join(str(r) for r in rest)}]"


@dataclass(eq=False)
class ModelContext:
    instance: PlanningInstance
    risk: RiskSettings
    flex: FlexibilitySettings
    include_cvar: bool
    merit: SheddingMeritOrder
    keys: list
    index: dict
    discount: np.ndarray
    scenario_names: list
    probabilities: np.ndarray

    def col(self, key) -> int:
        return self.index[key]

    def has(self, key) -> bool:
        return key in self.index


@dataclass(eq=False)
class PlanSolution:
    status: str
    objective: float  # TC
    ic: float
    oc: np.ndarray  # per scenario
    probabilities: np.ndarray
    scenario_names: list
    zeta: float = float("nan")
    a: Optional[np.ndarray] = None
    cvar: float = float("nan")
    omega: float = 0.0
    alpha: float = 0.9
    investments: dict = field(default_factory=dict)
    dispatch: dict = field(default_factory=dict)
    duals: Optional[np.ndarray] = None
    lost_load: float = 0.0  # expected weighted MWh
    iterations: int = 0
    basis: Optional[np.ndarray] = None

    @property
    def expected_oc(self) -> float:
        return float(self.probabilities @ self.oc)

    @property
    def ex_post(self) -> float:
        return self.ic + self.expected_oc


def _per_year(table: Mapping, key: str, ny: int) -> tuple:
    return tuple(table.get(key, (0.0,) * ny))


def variable_cost(inst: PlanningInstance, scen, ti: int, ni: int, yi: int) -> float:
    """Marginal generation cost of a technology at a node in one year and scenario."""
    if scen.variable_cost is not None:
        v = scen.variable_cost[ti, ni, yi]
        if not math.isnan(v):
            return float(v)
    tech = inst.technologies[ti]
    fuel = 0.0 if tech.fuel is None else float(scen.fuel_price[inst.fuel_index(tech.fuel), yi])
    return marginal_cost(tech, fuel, float(scen.co2_price[yi]))


def _availability(tech, node, t: int) -> float:
    prof = node.profiles.get(tech.name)
    return float(prof[t]) if prof is not None else float(tech.availability)


def build(instance: PlanningInstance, risk: RiskSettings, flex: FlexibilitySettings,
          include_cvar: bool = True) -> LinearProgram:
    """Assemble the deterministic-equivalent LP.

    With ``include_cvar=False`` the zeta, a_s and cvar columns and their rows
    are left out and the objective is IC + sum_s rho_s OC_s (requires omega = 0).
    """
    instance.validate()
    if not isinstance(risk, RiskSettings):
        raise TypeError("risk must be a RiskSettings")
    if not include_cvar and risk.omega != 0.0:
        raise ValueError("a model without CVaR terms is only defined for omega = 0")
    inst = instance
    scenarios = inst.scenarios
    if len(scenarios) == 0:
        raise ValueError("empty scenario set")

    years = list(inst.years)
    ny, nh = len(years), len(inst.hours)
    fin = inst.finance
    df = np.array([discount_factor(y, fin) for y in years])
    weights = np.array([h.weight for h in inst.hours])
    merit = build_merit_order(inst.nodes, flex.demand_response, flex.europe_average_vola)
    omega = risk.omega
    rho = scenarios.probabilities

    b = LPBuilder(inst.name)

    def V(key, lo=0.0, hi=np.inf, cost=0.0):
        return b.var(key, lo, hi, cost)

    # first stage ----------------------------------------------------------
    psp_techs = [t for t in inst.technologies if t.kind == TechKind.PSP]
    for ti, tech in enumerate(inst.technologies):
        if not tech.investable or tech.kind == TechKind.PSP:
            continue
        cx = annuity(tech.capex, fin.interest_rate, tech.lifetime)
        for node in inst.nodes:
            caps = node.x_max.get(tech.name, (np.inf,) * ny)
            if all(c == 0 for c in caps):
                continue
            for yi, year in enumerate(years):
                V(("x", tech.name, node.name, year), 0.0, float(caps[yi]), df[yi] * cx)
    if flex.ntc_expansion is not None:
        for ic in inst.interconnectors:
            if not ic.expandable:
                continue
            cy = annuity(ic.capex * flex.ntc_expansion, fin.interest_rate, ic.lifetime)
            for yi, year in enumerate(years):
                V(("y", ic.name, year), cost=df[yi] * cy)
    if flex.psp_expansion is not None:
        for tech in psp_techs:
            cz = annuity(tech.capex * flex.psp_expansion, fin.interest_rate, tech.lifetime)
            for node in inst.nodes:
                if node.z_max <= 0:
                    continue
                for yi, year in enumerate(years):
                    V(("z", tech.name, node.name, year), 0.0, float(node.z_max), df[yi] * cz)

    # second-stage accounting columns
    for s in scenarios:
        V(("oc", s.name), -np.inf, np.inf)
    if include_cvar:
        for s in scenarios:
            V(("a", s.name))
        V(("zeta",), -np.inf, np.inf)
        V(("cvar",), -np.inf, np.inf, omega)
        for si, s in enumerate(scenarios):
            b.add_cost(b.index[("oc", s.name)], (1.0 - omega) * rho[si])
    else:
        for si, s in enumerate(scenarios):
            b.add_cost(b.index[("oc", s.name)], rho[si])

    # irreversibility: cumulative investment never decreases
    for key in list(b.keys):
        fam = key[0]
        if fam not in INVESTMENT_FAMILIES:
            continue
        year = key[-1]
        yi = years.index(year)
        if yi + 1 < ny:
            nxt = key[:-1] + (years[yi + 1],)
            b.row(f"irrev_{key_name(key)}", [(b.index[key], 1.0), (b.index[nxt], -1.0)], hi=0.0)

    if flex.symmetric_ntc and flex.ntc_expansion is not None:
        links = {ic.name: ic for ic in inst.interconnectors if ic.expandable}
        for ic in inst.interconnectors:
            rev = f"{ic.target}>{ic.source}"
            if ic.name in links and rev in links and ic.source < ic.target:
                for year in years:
                    b.row(f"ntc_sym[{ic.name},{year}]",
                          [(b.index[("y", ic.name, year)], 1.0), (b.index[("y", rev, year)], -1.0)],
                          lo=0.0, hi=0.0)

    if include_cvar:
        terms = [(b.index[("cvar",)], 1.0), (b.index[("zeta",)], -1.0)]
        terms += [(b.index[("a", s.name)], -rho[si] / (1.0 - risk.alpha))
                  for si, s in enumerate(scenarios)]
        b.row("cvar_def", terms, lo=0.0)
        for s in scenarios:
            b.row(f"cvar_excess[{s.name}]",
                  [(b.index[("a", s.name)], 1.0), (b.index[("oc", s.name)], -1.0),
                   (b.index[("zeta",)], 1.0)], lo=0.0)

    # second stage -----------------------------------------------------------
    months = sorted({h.month for h in inst.hours})
    for si, scen in enumerate(scenarios):
        sname = scen.name
        oc_terms = [(b.index[("oc", sname)], 1.0)]
        for yi, year in enumerate(years):
            for ni, node in enumerate(inst.nodes):
                for ti, tech in enumerate(inst.technologies):
                    if tech.kind == TechKind.INTERMITTENT_RES:
                        cap = float(scen.res_capacity[ni, ti, yi])
                    else:
                        cap = float(_per_year(node.existing, tech.name, ny)[yi])
                    if tech.kind == TechKind.PSP:
                        inv = ("z", tech.name, node.name, year)
                    else:
                        inv = ("x", tech.name, node.name, year)
                    has_inv = inv in b.index
                    if cap <= 0 and not has_inv:
                        continue
                    vc = variable_cost(inst, scen, ti, ni, yi)
                    gcols = {}
                    for t in range(nh):
                        af = _availability(tech, node, t)
                        if af <= 0:
                            continue
                        gkey = ("g", tech.name, node.name, t, year, sname)
                        if has_inv:
                            j = V(gkey)
                            b.row(f"gen_cap[{tech.name},{node.name},{t},{year},{sname}]",
                                  [(j, 1.0), (b.index[inv], -af)], hi=af * cap)
                        else:
                            j = V(gkey, 0.0, af * cap)
                        gcols[t] = j
                        if vc != 0.0:
                            oc_terms.append((j, -df[yi] * weights[t] * vc))
                    if tech.kind == TechKind.PSP:
                        _storage(b, inst, tech, node, year, sname, cap, inv if has_inv else None, gcols)
                    if tech.kind == TechKind.HYDRO_RESERVOIR and tech.name in node.hydro_budget:
                        budget = node.hydro_budget[tech.name]
                        for mo in months:
                            if mo not in budget:
                                continue
                            cols = [(gcols[t], weights[t]) for t in gcols if inst.hours[t].month == mo]
                            if cols:
                                b.row(f"hydro_budget[{tech.name},{node.name},{mo},{year},{sname}]",
                                      cols, hi=cap * float(budget[mo]))

            for ic in inst.interconnectors:
                ntc = float(ic.ntc[yi])
                inv = ("y", ic.name, year)
                has_inv = inv in b.index
                if ntc <= 0 and not has_inv:
                    continue
                for t in range(nh):
                    fkey = ("flow", ic.name, t, year, sname)
                    if has_inv:
                        j = V(fkey)
                        b.row(f"flow_cap[{ic.name},{t},{year},{sname}]",
                              [(j, 1.0), (b.index[inv], -1.0)], hi=ntc)
                    else:
                        V(fkey, 0.0, ntc)

            for ni, node in enumerate(inst.nodes):
                for t in range(nh):
                    dem = float(scen.demand[ni, yi, t])
                    if merit:
                        for step in merit.for_node(node.name):
                            cap = dem * step.share
                            if cap <= 0:
                                continue
                            j = V(("shed", step.sector, node.name, t, year, sname), 0.0, cap)
                            oc_terms.append((j, -df[yi] * weights[t] * step.vola))
                    elif flex.lost_load_penalty is not None and dem > 0:
                        j = V(("ll", node.name, t, year, sname), 0.0, dem)
                        oc_terms.append((j, -df[yi] * weights[t] * flex.lost_load_penalty))
                    b.row(f"balance[{node.name},{t},{year},{sname}]",
                          _balance_terms(b.index, inst, node, t, year, sname), lo=dem, hi=dem)
        b.row(f"oc_def[{sname}]", oc_terms, lo=0.0, hi=0.0)

    meta = ModelContext(
        instance=inst, risk=risk, flex=flex, include_cvar=include_cvar, merit=merit,
        keys=list(b.keys), index=dict(b.index), discount=df,
        scenario_names=scenarios.names, probabilities=rho,
    )
    return b.build(names=[key_name(k) for k in b.keys], meta=meta)


def _storage(b, inst, tech, node, year, sname, cap, inv, gcols):
    nh = len(inst.hours)
    eta = tech.efficiency
    pump_cols, sl_cols = {}, {}
    for t in range(nh):
        af = _availability(tech, node, t)
        pkey = ("pump", tech.name, node.name, t, year, sname)
        skey = ("sl", tech.name, node.name, t, year, sname)
        label = f"{tech.name},{node.name},{t},{year},{sname}"
        if af > 0:
            if inv is not None:
                pump_cols[t] = b.var(pkey)
                b.row(f"pump_cap[{label}]", [(pump_cols[t], 1.0), (b.index[inv], -af)], hi=af * cap)
            else:
                pump_cols[t] = b.var(pkey, 0.0, af * cap)
        if inv is not None:
            sl_cols[t] = b.var(skey)
            b.row(f"storage_cap[{label}]", [(sl_cols[t], 1.0), (b.index[inv], -inst.cpf)],
                  hi=inst.cpf * cap)
        else:
            sl_cols[t] = b.var(skey, 0.0, inst.cpf * cap)
    for t in range(nh):
        label = f"{tech.name},{node.name},{t},{year},{sname}"
        terms = [(sl_cols[t], 1.0)]
        prev = t - 1 if t > 0 else (nh - 1 if inst.cyclic_storage else None)
        if prev is not None and prev != t:
            terms.append((sl_cols[prev], -1.0))
        if t in pump_cols:
            terms.append((pump_cols[t], -eta))
        if t in gcols:
            terms.append((gcols[t], 1.0))
        b.row(f"storage[{label}]", terms, lo=0.0, hi=0.0)


def _balance_terms(index, inst, node, t, year, sname):
    terms = []
    for tech in inst.technologies:
        j = index.get(("g", tech.name, node.name, t, year, sname))
        if j is not None:
            terms.append((j, 1.0))
        if tech.kind == TechKind.PSP:
            j = index.get(("pump", tech.name, node.name, t, year, sname))
            if j is not None:
                terms.append((j, -1.0))
    for ic in inst.interconnectors:
        j = index.get(("flow", ic.name, t, year, sname))
        if j is None:
            continue
        if ic.target == node.name:
            terms.append((j, 1.0))
        elif ic.source == node.name:
            terms.append((j, -1.0))
    for sector in inst.sectors:
        j = index.get(("shed", sector, node.name, t, year, sname))
        if j is not None:
            terms.append((j, 1.0))
    j = index.get(("ll", node.name, t, year, sname))
    if j is not None:
        terms.append((j, 1.0))
    return terms


def fix_first_stage(lp: LinearProgram, investments: Mapping, tol: float = 1e-9) -> LinearProgram:
    """Copy of ``lp`` with the given investment columns pinned to their values.

    Keys may be variable-key tuples or column names.
    """
    lo = np.array(lp.col_lo)
    hi = np.array(lp.col_hi)
    meta = lp.meta
    for key, value in investments.items():
        if isinstance(key, tuple):
            if meta is None:
                raise KeyError("tuple keys need a model-built LP")
            if key[0] not in INVESTMENT_FAMILIES:
                raise KeyError(f"{key!r} is not a first-stage variable")
            j = meta.index[key]
        else:
            j = lp.column(key)
        v = float(value)
        slack = tol * max(1.0, abs(v))
        if v < lo[j] - slack or v > hi[j] + slack:
            raise ValueError(f"{lp.col_names[j]} = {v} outside its bounds [{lo[j]}, {hi[j]}]")
        v = min(max(v, lo[j]), hi[j])
        lo[j] = hi[j] = v
    return lp.with_bounds(col_lo=lo, col_hi=hi)


def operating_costs(ctx: ModelContext, values: np.ndarray) -> np.ndarray:
    """Per-scenario discounted dispatch cost recomputed from generation and shedding."""
    inst = ctx.instance
    years = list(inst.years)
    scen_pos = {name: i for i, name in enumerate(ctx.scenario_names)}
    tech_pos = {t.name: i for i, t in enumerate(inst.technologies)}
    node_pos = {n.name: i for i, n in enumerate(inst.nodes)}
    steps = {}
    if ctx.merit:
        for node in inst.nodes:
            for st in ctx.merit.for_node(node.name):
                steps[(node.name, st.sector)] = st.vola
    oc = np.zeros(len(ctx.scenario_names))
    vc_cache = {}
    for key, j in ctx.index.items():
        fam = key[0]
        v = values[j]
        if v == 0.0 or fam not in ("g", "shed", "ll"):
            continue
        if fam == "g":
            _, tech, node, t, year, s = key
            yi = years.index(year)
            ck = (tech, node, yi, s)
            if ck not in vc_cache:
                scen = inst.scenarios[scen_pos[s]]
                vc_cache[ck] = variable_cost(inst, scen, tech_pos[tech], node_pos[node], yi)
            price = vc_cache[ck]
        elif fam == "shed":
            _, sector, node, t, year, s = key
            price = steps[(node, sector)]
        else:
            _, node, t, year, s = key
            price = ctx.flex.lost_load_penalty
        yi = years.index(year)
        oc[scen_pos[s]] += ctx.discount[yi] * inst.hours[t].weight * price * v
    return oc


def extract(lp: LinearProgram, x: np.ndarray, tol: float = 1e-6, duals=None,
            status: str = "optimal", iterations: int = 0, basis=None) -> PlanSolution:
    """Package a primal vector as a PlanSolution after checking it against the model."""
    ctx: ModelContext = lp.meta
    if ctx is None:
        raise ValueError("extract needs an LP produced by model.build")
    x = np.asarray(x, dtype=float)
    viol = lp.max_violation(x)
    if viol > tol:
        raise IntegrityError(f"solution violates the model by {viol:.3g} (relative)")
    names = ctx.scenario_names
    oc = np.array([x[ctx.index[("oc", s)]] for s in names])
    recomputed = operating_costs(ctx, x)
    for s, a, r in zip(names, oc, recomputed):
        if abs(a - r) > tol * max(1.0, abs(a)):
            raise IntegrityError(f"oc[{s}] = {a!r} but dispatch costs {r!r}")

    investments, dispatch = {}, {}
    ic = 0.0
    for key, j in ctx.index.items():
        fam = key[0]
        if fam in INVESTMENT_FAMILIES:
            investments[key] = float(x[j])
            ic += float(lp.c[j] * x[j])
        elif fam not in ("oc", "a", "zeta", "cvar"):
            dispatch[key] = float(x[j])

    lost = 0.0
    pos = {s: i for i, s in enumerate(names)}
    for key, v in dispatch.items():
        if key[0] == "ll" and v:
            lost += ctx.probabilities[pos[key[-1]]] * ctx.instance.hours[key[2]].weight * v

    sol = PlanSolution(
        status=status, objective=lp.objective(x), ic=ic, oc=oc,
        probabilities=ctx.probabilities, scenario_names=list(names),
        omega=ctx.risk.omega, alpha=ctx.risk.alpha,
        investments=investments, dispatch=dispatch, duals=duals, lost_load=lost,
        iterations=iterations, basis=basis,
    )
    if ctx.include_cvar:
        sol.zeta = float(x[ctx.index[("zeta",)]])
        sol.a = np.array([x[ctx.index[("a", s)]] for s in names])
        sol.cvar = float(x[ctx.index[("cvar",)]])
    return sol


def solve_model(lp: LinearProgram, options=None, warm_start=None) -> PlanSolution:
    """Solve a model LP and extract its PlanSolution; raises on non-optimal status."""
    from .solve import SolverOptions, solve

    rep = solve(lp, options or SolverOptions(), warm_start)
    if not rep.optimal:
        raise RuntimeError(f"model solve ended with status {rep.status}")
    return extract(lp, rep.x, duals=rep.row_duals, status=rep.status,
                   iterations=rep.iterations, basis=rep.basis)
