"""The complete, immutable description of one planning problem."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from .core import FinanceSettings, Hour, Technology, TechKind
from .scenario import AnchorSet, ScenarioSet

SHARE_TOL = 1e-9


@dataclass(frozen=True)
class Violation:
    code: str
    where: str
    message: str

    def __str__(self):
        return f"[{self.code}] {self.where}: {self.message}"


class InstanceError(ValueError):
    """Raised with every validation violation found, not just the first."""

    def __init__(self, violations):
        self.violations = list(violations)
        lines = "\n".join(f"  {v}" for v in self.violations)
        super().__init__(f"{len(self.violations)} instance violation(s):\n{lines}")

    @property
    def codes(self) -> set:
        return {v.code for v in self.violations}


@dataclass(frozen=True)
class PlanningInstance:
    name: str
    years: tuple
    technologies: tuple
    nodes: tuple
    hours: tuple
    scenarios: ScenarioSet
    fuels: tuple = ()
    sectors: tuple = ()
    interconnectors: tuple = ()
    certain_years: tuple = ()
    finance: FinanceSettings = field(default_factory=FinanceSettings)
    anchors: Optional[AnchorSet] = None
    factors: Optional[tuple] = None
    cpf: float = 9.0
    cyclic_storage: bool = False

    # index helpers -------------------------------------------------------

    def tech(self, name: str) -> Technology:
        for t in self.technologies:
            if t.name == name:
                return t
        raise KeyError(name)

    def tech_index(self, name: str) -> int:
        return [t.name for t in self.technologies].index(name)

    def node_index(self, name: str) -> int:
        return [n.name for n in self.nodes].index(name)

    def fuel_index(self, name: str) -> int:
        return list(self.fuels).index(name)

    @property
    def certain_year_indices(self) -> tuple:
        return tuple(self.years.index(y) for y in self.certain_years if y in self.years)

    def with_hour_weight(self, weight: float) -> "PlanningInstance":
        return replace(self, hours=tuple(Hour(weight, h.month) for h in self.hours))

    def with_scenarios(self, scenarios: ScenarioSet) -> "PlanningInstance":
        return replace(self, scenarios=scenarios)

    # validation ----------------------------------------------------------

    def violations(self) -> list:
        out = []

        def bad(code, where, message):
            out.append(Violation(code, where, message))

        ny, nh = len(self.years), len(self.hours)
        tech_names = [t.name for t in self.technologies]
        node_names = [n.name for n in self.nodes]
        for label, names in (("technology", tech_names), ("node", node_names),
                             ("fuel", list(self.fuels)), ("sector", list(self.sectors)),
                             ("year", list(self.years))):
            if len(set(names)) != len(names):
                bad("DUPLICATE", label, f"duplicate {label} identifiers")
        if list(self.years) != sorted(self.years):
            bad("YEAR_ORDER", "years", "years must be increasing")
        if self.years and self.years[0] < self.finance.base_year:
            bad("YEAR_ORDER", "years", "first year precedes the finance base year")
        for y in self.certain_years:
            if y not in self.years:
                bad("UNRESOLVED_REF", "certain_years", f"unknown year {y}")
        if self.cpf <= 0:
            bad("NEGATIVE", "cpf", "capacity-power factor must be positive")

        for t in self.technologies:
            if t.fuel is not None and t.fuel not in self.fuels:
                bad("UNRESOLVED_REF", f"technology {t.name}", f"unknown fuel {t.fuel!r}")
            if not 0.0 <= t.availability <= 1.0:
                bad("AVAILABILITY", f"technology {t.name}", "availability outside [0, 1]")

        for i, h in enumerate(self.hours):
            if not h.weight > 0:
                bad("HOUR_WEIGHT", f"hour {i}", f"weight must be positive, got {h.weight}")
            if not 1 <= h.month <= 12:
                bad("MONTH", f"hour {i}", f"month must lie in 1..12, got {h.month}")

        for n in self.nodes:
            where = f"node {n.name}"
            total = sum(n.shares.values())
            if n.shares and abs(total - 1.0) > SHARE_TOL:
                bad("SHARE_SUM", where, f"sector shares sum to {total:.12g}, not 1")
            for sector, share in n.shares.items():
                if sector not in self.sectors:
                    bad("UNRESOLVED_REF", where, f"unknown sector {sector!r} in shares")
                if share < 0:
                    bad("NEGATIVE", where, f"negative share for {sector}")
                if sector not in n.vola:
                    bad("UNRESOLVED_REF", where, f"sector {sector!r} has no VoLA")
            for sector, value in n.vola.items():
                if sector not in self.sectors:
                    bad("UNRESOLVED_REF", where, f"unknown sector {sector!r} in vola")
                if not value > 0:
                    bad("NEGATIVE", where, f"VoLA of {sector} must be positive")
            if n.z_max < 0:
                bad("NEGATIVE", where, "z_max must be non-negative")
            for label, table in (("existing", n.existing), ("x_max", n.x_max)):
                for tech, values in table.items():
                    if tech not in tech_names:
                        bad("UNRESOLVED_REF", where, f"unknown technology {tech!r} in {label}")
                    if len(values) != ny:
                        bad("LENGTH", where, f"{label}[{tech}] needs {ny} values")
                    if any(v < 0 for v in values):
                        bad("NEGATIVE", where, f"{label}[{tech}] has negative entries")
            for tech, prof in n.profiles.items():
                if tech not in tech_names:
                    bad("UNRESOLVED_REF", where, f"unknown technology {tech!r} in profiles")
                if len(prof) != nh:
                    bad("LENGTH", where, f"profile {tech} needs {nh} values")
                if any(not 0.0 <= v <= 1.0 for v in prof):
                    bad("AVAILABILITY", where, f"profile {tech} outside [0, 1]")
            for tech, budget in n.hydro_budget.items():
                if tech not in tech_names:
                    bad("UNRESOLVED_REF", where, f"unknown technology {tech!r} in hydro_budget")
                elif self.tech(tech).kind != TechKind.HYDRO_RESERVOIR:
                    bad("KIND", where, f"hydro_budget given for non-reservoir {tech!r}")
                if any(v < 0 for v in budget.values()):
                    bad("NEGATIVE", where, f"hydro_budget[{tech}] has negative entries")

        for ic in self.interconnectors:
            where = f"interconnector {ic.name}"
            for end in (ic.source, ic.target):
                if end not in node_names:
                    bad("UNRESOLVED_REF", where, f"unknown node {end!r}")
            if ic.source == ic.target:
                bad("UNRESOLVED_REF", where, "interconnector joins a node to itself")
            if len(ic.ntc) != ny:
                bad("LENGTH", where, f"ntc needs {ny} values")
            if any(v < 0 for v in ic.ntc):
                bad("NEGATIVE", where, "negative NTC")
            if ic.capex < 0:
                bad("NEGATIVE", where, "negative capex")

        out.extend(self._scenario_violations())
        return out

    def _scenario_violations(self) -> list:
        out = []
        shapes = {
            "demand": (len(self.nodes), len(self.years), len(self.hours)),
            "res_capacity": (len(self.nodes), len(self.technologies), len(self.years)),
            "fuel_price": (len(self.fuels), len(self.years)),
            "co2_price": (len(self.years),),
        }
        vc_shape = (len(self.technologies), len(self.nodes), len(self.years))
        certain = list(self.certain_year_indices)
        first = None
        for s in self.scenarios:
            where = f"scenario {s.name}"
            ok = True
            for name, shape in shapes.items():
                arr = getattr(s, name)
                if arr.shape != shape:
                    ok = False
                    out.append(Violation("SHAPE", where, f"{name} has shape {arr.shape}, expected {shape}"))
                elif np.any(arr < 0):
                    out.append(Violation("NEGATIVE", where, f"{name} has negative entries"))
            if s.variable_cost is not None and s.variable_cost.shape != vc_shape:
                ok = False
                out.append(Violation("SHAPE", where, f"variable_cost must have shape {vc_shape}"))
            if not ok:
                continue
            if first is None:
                first = s
            elif certain and not _certain_match(first, s, certain):
                out.append(Violation("CERTAIN_MISMATCH", where,
                                     f"first-stage year data differ from scenario {first.name}"))
        return out

    def validate(self) -> "PlanningInstance":
        found = self.violations()
        if found:
            raise InstanceError(found)
        return self


def _certain_match(a, b, idx) -> bool:
    return (
        np.array_equal(a.demand[:, idx, :], b.demand[:, idx, :])
        and np.array_equal(a.res_capacity[:, :, idx], b.res_capacity[:, :, idx])
        and np.array_equal(a.fuel_price[:, idx], b.fuel_price[:, idx])
        and np.array_equal(a.co2_price[idx], b.co2_price[idx])
    )
