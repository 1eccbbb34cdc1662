"""JSON instance documents (schema version 1).

Layout::

    {
      "schema_version": 1,
      "name": "toy",
      "years": [2020, 2025, 2030],
      "certain_years": [2020],
      "finance": {"interest_rate": 0.06, "discount_rate": 0.06, "base_year": 2020},
      "cpf": 9, "cyclic_storage": false,
      "fuels": [...], "sectors": [...],
      "technologies": [{"name", "kind", "fuel", "efficiency", "emission_factor",
                        "capex", "lifetime", "investable", "vom", "availability"}],
      "nodes": [{"name", "existing": {tech: [per year]}, "x_max": {tech: [per year]},
                 "z_max", "shares": {sector: f}, "vola": {sector: EUR/MWh},
                 "profiles": {tech: [per hour]}, "hydro_budget": {tech: {month: h}}}],
      "interconnectors": [{"from", "to", "ntc": [per year], "capex", "lifetime", "expandable"}],
      "hours": [{"weight", "month"}],
      "scenarios": {"anchors": {label: DATA}, "factors": [...]}
                or {"explicit": [{"name", "probability", **DATA}]}
    }

where DATA is ``{"demand": {node: [[per hour] per year]},
"res_capacity": {node: {tech: [per year]}}, "fuel_price": {fuel: [per year]},
"co2_price": [per year]}``. Anchor data for the certain years must agree.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .core import FinanceSettings, Hour, Interconnector, Node, Technology
from .instance import InstanceError, PlanningInstance, Violation
from .scenario import DEFAULT_FACTORS, AnchorSet, Scenario, ScenarioSet, build_set

SCHEMA_VERSION = 1


def _tuple(v):
    return tuple(float(x) for x in v)


def _scenario_arrays(data: dict, inst_sets: dict, where: str, errors: list) -> dict:
    nodes, techs, fuels, ny, nh = (inst_sets[k] for k in ("nodes", "techs", "fuels", "ny", "nh"))
    demand = np.zeros((len(nodes), ny, nh))
    res = np.zeros((len(nodes), len(techs), ny))
    fuel = np.zeros((len(fuels), ny))
    co2 = np.zeros(ny)

    def bad(code, msg):
        errors.append(Violation(code, where, msg))

    for node, rows in data.get("demand", {}).items():
        if node not in nodes:
            bad("UNRESOLVED_REF", f"unknown node {node!r} in demand")
            continue
        arr = np.asarray(rows, dtype=float)
        if arr.shape != (ny, nh):
            bad("SHAPE", f"demand[{node}] must be {ny} years x {nh} hours")
            continue
        demand[nodes.index(node)] = arr
    for node, table in data.get("res_capacity", {}).items():
        if node not in nodes:
            bad("UNRESOLVED_REF", f"unknown node {node!r} in res_capacity")
            continue
        for tech, values in table.items():
            if tech not in techs:
                bad("UNRESOLVED_REF", f"unknown technology {tech!r} in res_capacity")
                continue
            if len(values) != ny:
                bad("LENGTH", f"res_capacity[{node}][{tech}] needs {ny} values")
                continue
            res[nodes.index(node), techs.index(tech)] = values
    for f, values in data.get("fuel_price", {}).items():
        if f not in fuels:
            bad("UNRESOLVED_REF", f"unknown fuel {f!r} in fuel_price")
            continue
        if len(values) != ny:
            bad("LENGTH", f"fuel_price[{f}] needs {ny} values")
            continue
        fuel[fuels.index(f)] = values
    values = data.get("co2_price", [0.0] * ny)
    if len(values) != ny:
        bad("LENGTH", f"co2_price needs {ny} values")
    else:
        co2[:] = values
    return dict(demand=demand, res_capacity=res, fuel_price=fuel, co2_price=co2)


def instance_from_dict(doc: dict) -> PlanningInstance:
    """Parse and validate; raises InstanceError listing every violation."""
    errors = []
    version = doc.get("schema_version")
    if version != SCHEMA_VERSION:
        raise InstanceError([Violation("SCHEMA", "schema_version",
                                       f"unsupported schema version {version!r}")])
    for req in ("years", "technologies", "nodes", "hours", "scenarios"):
        if req not in doc:
            errors.append(Violation("SCHEMA", req, "missing required key"))
    if errors:
        raise InstanceError(errors)

    years = tuple(int(y) for y in doc["years"])
    ny = len(years)
    try:
        finance = FinanceSettings(**doc.get("finance", {}))
    except (TypeError, ValueError) as exc:
        errors.append(Violation("SCHEMA", "finance", str(exc)))
        finance = FinanceSettings()

    techs = []
    for i, t in enumerate(doc["technologies"]):
        try:
            techs.append(Technology(**t))
        except (TypeError, ValueError) as exc:
            errors.append(Violation("SCHEMA", f"technologies[{i}]", str(exc)))

    nodes = []
    for n in doc["nodes"]:
        nodes.append(Node(
            name=n["name"],
            existing={k: _tuple(v) for k, v in n.get("existing", {}).items()},
            x_max={k: _tuple(v) for k, v in n.get("x_max", {}).items()},
            z_max=float(n.get("z_max", 0.0)),
            shares={k: float(v) for k, v in n.get("shares", {}).items()},
            vola={k: float(v) for k, v in n.get("vola", {}).items()},
            profiles={k: _tuple(v) for k, v in n.get("profiles", {}).items()},
            hydro_budget={k: {int(m): float(h) for m, h in v.items()}
                          for k, v in n.get("hydro_budget", {}).items()},
        ))
    links = []
    for i, ic in enumerate(doc.get("interconnectors", [])):
        try:
            links.append(Interconnector(
                source=ic["from"], target=ic["to"], ntc=_tuple(ic["ntc"]),
                capex=float(ic.get("capex", 0.0)), lifetime=int(ic.get("lifetime", 50)),
                expandable=bool(ic.get("expandable", True)),
            ))
        except (KeyError, TypeError, ValueError) as exc:
            errors.append(Violation("SCHEMA", f"interconnectors[{i}]", str(exc)))
    hours = tuple(Hour(float(h["weight"]), int(h["month"])) for h in doc["hours"])

    sets = dict(nodes=[n.name for n in nodes], techs=[t.name for t in techs],
                fuels=list(doc.get("fuels", [])), ny=ny, nh=len(hours))
    certain = tuple(int(y) for y in doc.get("certain_years", ()))
    certain_idx = tuple(years.index(y) for y in certain if y in years)
    sdoc = doc["scenarios"]
    anchors = None
    factors = None
    scenario_set = None
    if "anchors" in sdoc:
        items = []
        for label, data in sdoc["anchors"].items():
            arrays = _scenario_arrays(data, sets, f"anchor {label}", errors)
            items.append(Scenario(name=label, **arrays))
        factors = tuple(float(f) for f in sdoc.get("factors", DEFAULT_FACTORS))
        if not errors:
            try:
                anchors = AnchorSet(tuple(items), certain_idx)
                scenario_set = build_set(anchors, factors)
            except ValueError as exc:
                code = "CERTAIN_MISMATCH" if "first-stage" in str(exc) else "SCHEMA"
                errors.append(Violation(code, "scenarios.anchors", str(exc)))
    elif "explicit" in sdoc:
        items = []
        for i, data in enumerate(sdoc["explicit"]):
            arrays = _scenario_arrays(data, sets, f"scenario {data.get('name', i)}", errors)
            items.append(Scenario(name=str(data.get("name", f"s{i}")),
                                  probability=float(data.get("probability", 0.0)), **arrays))
        if not errors:
            try:
                scenario_set = ScenarioSet(tuple(items))
            except ValueError as exc:
                errors.append(Violation("PROBABILITY", "scenarios.explicit", str(exc)))
    else:
        errors.append(Violation("SCHEMA", "scenarios", "need 'anchors' or 'explicit'"))

    if errors:
        raise InstanceError(errors)
    inst = PlanningInstance(
        name=str(doc.get("name", "instance")), years=years, technologies=tuple(techs),
        nodes=tuple(nodes), hours=hours, scenarios=scenario_set,
        fuels=tuple(doc.get("fuels", ())), sectors=tuple(doc.get("sectors", ())),
        interconnectors=tuple(links), certain_years=certain, finance=finance,
        anchors=anchors, factors=factors, cpf=float(doc.get("cpf", 9.0)),
        cyclic_storage=bool(doc.get("cyclic_storage", False)),
    )
    inst.validate()
    return inst


def _scenario_doc(inst: PlanningInstance, s: Scenario) -> dict:
    nodes = [n.name for n in inst.nodes]
    return {
        "demand": {n: s.demand[i].tolist() for i, n in enumerate(nodes)},
        "res_capacity": {
            n: {t.name: s.res_capacity[i, k].tolist()
                for k, t in enumerate(inst.technologies) if t.kind.value == "intermittent_res"}
            for i, n in enumerate(nodes)
        },
        "fuel_price": {f: s.fuel_price[k].tolist() for k, f in enumerate(inst.fuels)},
        "co2_price": s.co2_price.tolist(),
    }


def instance_to_dict(inst: PlanningInstance) -> dict:
    if inst.anchors is not None:
        scen = {"anchors": {a.name: _scenario_doc(inst, a) for a in inst.anchors.anchors},
                "factors": list(inst.factors or DEFAULT_FACTORS)}
    else:
        scen = {"explicit": [{"name": s.name, "probability": s.probability,
                              **_scenario_doc(inst, s)} for s in inst.scenarios]}
    return {
        "schema_version": SCHEMA_VERSION,
        "name": inst.name,
        "years": list(inst.years),
        "certain_years": list(inst.certain_years),
        "finance": {"interest_rate": inst.finance.interest_rate,
                    "discount_rate": inst.finance.discount_rate,
                    "base_year": inst.finance.base_year},
        "cpf": inst.cpf,
        "cyclic_storage": inst.cyclic_storage,
        "fuels": list(inst.fuels),
        "sectors": list(inst.sectors),
        "technologies": [
            {"name": t.name, "kind": t.kind.value, "fuel": t.fuel, "efficiency": t.efficiency,
             "emission_factor": t.emission_factor, "capex": t.capex, "lifetime": t.lifetime,
             "investable": t.investable, "vom": t.vom, "availability": t.availability}
            for t in inst.technologies
        ],
        "nodes": [
            {"name": n.name,
             "existing": {k: list(v) for k, v in n.existing.items()},
             "x_max": {k: list(v) for k, v in n.x_max.items()},
             "z_max": n.z_max,
             "shares": dict(n.shares), "vola": dict(n.vola),
             "profiles": {k: list(v) for k, v in n.profiles.items()},
             "hydro_budget": {k: {str(m): h for m, h in v.items()} for k, v in n.hydro_budget.items()}}
            for n in inst.nodes
        ],
        "interconnectors": [
            {"from": ic.source, "to": ic.target, "ntc": list(ic.ntc), "capex": ic.capex,
             "lifetime": ic.lifetime, "expandable": ic.expandable}
            for ic in inst.interconnectors
        ],
        "hours": [{"weight": h.weight, "month": h.month} for h in inst.hours],
        "scenarios": scen,
    }


def dumps_instance(inst: PlanningInstance) -> str:
    return json.dumps(instance_to_dict(inst), indent=1, sort_keys=False) + "\n"


def load_instance(path) -> PlanningInstance:
    path = Path(path)
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise InstanceError([Violation("SCHEMA", str(path), f"invalid JSON: {exc}")]) from None
    return instance_from_dict(doc)


def save_instance(inst: PlanningInstance, path) -> None:
    Path(path).write_text(dumps_instance(inst), encoding="utf-8")
