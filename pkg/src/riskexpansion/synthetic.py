"""Desk-scale synthetic instances.

Three anchor futures are generated per instance. Their 2030 values follow a
fixed pattern: the anchor with the highest CO2 price has the lowest demand and
the one with the lowest CO2 price has middling demand, so CO2 prices and demand
are negatively correlated across anchors. Seeds only perturb magnitudes, never
these orderings.
"""

from __future__ import annotations

import numpy as np

from .core import FinanceSettings, Hour, Interconnector, Node, TechKind, Technology
from .instance import PlanningInstance
from .scenario import DEFAULT_FACTORS, AnchorSet, Scenario, build_set

SECTORS = ("commerce", "households", "industry")

# name, kind, fuel, efficiency, emission factor, capex, lifetime, investable, vom, availability
_CATALOG = (
    ("ocgt", TechKind.THERMAL, "gas", 0.38, 0.20, 450e3, 30, True, 3.0, 0.95),
    ("lignite", TechKind.THERMAL, "lignite", 0.40, 0.36, 1.6e6, 40, True, 5.0, 0.90),
    ("wind", TechKind.INTERMITTENT_RES, None, 1.0, 0.0, 0.0, 25, False, 0.0, 1.0),
    ("nuclear", TechKind.THERMAL, "uranium", 0.33, 0.0, 4.5e6, 50, True, 8.0, 0.90),
    ("psp", TechKind.PSP, None, 0.75, 0.0, 1.1e6, 60, True, 0.0, 1.0),
    ("hydro", TechKind.HYDRO_RESERVOIR, None, 1.0, 0.0, 0.0, 80, False, 0.0, 1.0),
)

# 2030 anchor levels: demand growth against 2020, CO2 price, gas price
_ANCHOR_2030 = {
    "DG": dict(growth=1.15, co2=50.0, gas=25.0, wind=1.8),
    "EUCO": dict(growth=1.05, co2=28.8, gas=22.0, wind=1.5),
    "ST": dict(growth=0.95, co2=89.9, gas=30.0, wind=1.3),
}
_BASE_2020 = dict(co2=25.0, gas=20.0, lignite=4.0, uranium=3.0)


def _tech(row) -> Technology:
    name, kind, fuel, eta, ef, capex, life, inv, vom, af = row
    return Technology(name=name, kind=kind, fuel=fuel, efficiency=eta, emission_factor=ef,
                      capex=capex, lifetime=life, investable=inv, vom=vom, availability=af)


def _hours(n_hours: int, n_peak: int, peak_weight: float) -> tuple:
    rest = (8760.0 - n_peak * peak_weight) / (n_hours - n_peak)
    return tuple(
        Hour(weight=peak_weight if t < n_peak else rest, month=1 + (12 * t) // n_hours)
        for t in range(n_hours)
    )


def _interp(base: float, target: float, years, base_year=2020, end_year=2030) -> list:
    return [base + (target - base) * (y - base_year) / (end_year - base_year) for y in years]


def check_anchor_structure(anchors) -> None:
    """CO2 prices strictly ordered across anchors and anti-ordered with total demand."""
    last = -1
    co2 = np.array([a.co2_price[last] for a in anchors])
    dem = np.array([a.demand[:, last, :].sum() for a in anchors])
    if len(set(co2)) != len(co2):
        raise ValueError("anchor CO2 prices are not strictly ordered")
    hi, lo = int(np.argmax(co2)), int(np.argmin(co2))
    if dem[hi] != dem.min() or dem[hi] >= dem[lo]:
        raise ValueError("highest-CO2 anchor must carry the lowest demand")


def make_synthetic(seed: int = 1, n_nodes: int = 2, n_hours: int = 6, n_techs: int = 3,
                   years=(2020, 2030), factors=DEFAULT_FACTORS,
                   restrict_first_year: bool = True, name: str | None = None) -> PlanningInstance:
    """Deterministic multi-node instance with three anchors and the default 22 scenarios.

    The first ``n_techs`` entries of the catalog (ocgt, lignite, wind, nuclear,
    psp, hydro) are used. One representative hour in six is a low-weight peak
    hour, so shedding at peak is competitive with building peakers.
    """
    if not 1 <= n_nodes <= 10:
        raise ValueError("n_nodes must be in 1..10")
    if not 2 <= n_hours <= 48:
        raise ValueError("n_hours must be in 2..48")
    if not 1 <= n_techs <= len(_CATALOG):
        raise ValueError(f"n_techs must be in 1..{len(_CATALOG)}")
    years = tuple(int(y) for y in years)
    if len(years) < 2 or list(years) != sorted(set(years)):
        raise ValueError("years must be at least two strictly increasing values")
    rng = np.random.default_rng(seed)
    techs = tuple(_tech(r) for r in _CATALOG[:n_techs])
    tnames = [t.name for t in techs]
    fuels = tuple(f for f in ("gas", "lignite", "uranium") if any(t.fuel == f for t in techs))
    ny = len(years)
    n_peak = max(1, n_hours // 6)
    hours = _hours(n_hours, n_peak, peak_weight=4.0)

    nodes, base_load, shapes = [], [], []
    for k in range(n_nodes):
        peak = float(np.round(rng.uniform(800.0, 1200.0), 1))
        shape = np.round(rng.uniform(0.45, 0.85, n_hours), 3)
        shape[:n_peak] = 1.0
        base_load.append(peak)
        shapes.append(shape)
        existing = {}
        for t in techs:
            if t.kind == TechKind.THERMAL:
                share = {"ocgt": 0.15, "lignite": 0.45, "nuclear": 0.25}[t.name]
                fade = {"ocgt": 0.8, "lignite": 0.4, "nuclear": 0.6}[t.name]
                existing[t.name] = tuple(
                    round(share * peak * v, 1) for v in _interp(1.0, fade, years))
            elif t.kind == TechKind.PSP:
                existing[t.name] = (round(0.05 * peak, 1),) * ny
            elif t.kind == TechKind.HYDRO_RESERVOIR:
                existing[t.name] = (round(0.05 * peak, 1),) * ny
        x_max = {}
        if restrict_first_year:
            for t in techs:
                if t.investable and t.kind != TechKind.PSP:
                    cap = round(2.0 * peak, 1)
                    first = cap if t.name == "ocgt" else 0.0
                    x_max[t.name] = (first,) + (cap,) * (ny - 1)
        raw = rng.dirichlet(np.ones(len(SECTORS)) * 4.0)
        shares = np.round(raw, 6)
        shares[-1] = 1.0 - shares[:-1].sum()
        vola = {
            "industry": float(np.round(rng.uniform(800.0, 1500.0))),
            "commerce": float(np.round(rng.uniform(2000.0, 4000.0))),
            "households": float(np.round(rng.uniform(5000.0, 8000.0))),
        }
        profiles = {}
        if "wind" in tnames:
            profiles["wind"] = tuple(np.round(rng.uniform(0.05, 0.6, n_hours), 3).tolist())
        budget = {}
        if "hydro" in tnames:
            budget["hydro"] = {m: 300.0 for m in sorted({h.month for h in hours})}
        nodes.append(Node(
            name=f"N{k + 1}", existing=existing, x_max=x_max,
            z_max=round(0.3 * peak, 1) if "psp" in tnames else 0.0,
            shares=dict(zip(SECTORS, (float(s) for s in shares))), vola=vola,
            profiles=profiles, hydro_budget=budget,
        ))

    links = []
    for k in range(n_nodes - 1):
        a, b = nodes[k].name, nodes[k + 1].name
        ntc = round(0.1 * min(base_load[k], base_load[k + 1]), 1)
        for src, dst in ((a, b), (b, a)):
            links.append(Interconnector(source=src, target=dst, ntc=(ntc,) * ny,
                                        capex=800e3, lifetime=50))

    anchors = []
    jitter = rng.uniform(-0.01, 0.01)
    for label, spec in _ANCHOR_2030.items():
        growth = _interp(1.0, spec["growth"] + jitter, years)
        demand = np.array([[shapes[k] * base_load[k] * g for g in growth] for k in range(n_nodes)])
        res = np.zeros((n_nodes, n_techs, ny))
        if "wind" in tnames:
            w = tnames.index("wind")
            for k in range(n_nodes):
                res[k, w] = [0.3 * base_load[k] * v for v in _interp(1.0, spec["wind"], years)]
        prices = {"gas": _interp(_BASE_2020["gas"], spec["gas"], years),
                  "lignite": [_BASE_2020["lignite"]] * ny,
                  "uranium": [_BASE_2020["uranium"]] * ny}
        fuel = np.array([prices[f] for f in fuels]).reshape(len(fuels), ny)
        co2 = np.array(_interp(_BASE_2020["co2"], spec["co2"], years))
        anchors.append(Scenario(name=label, demand=np.round(demand, 3), res_capacity=res,
                                fuel_price=fuel, co2_price=co2))
    check_anchor_structure(anchors)
    anchor_set = AnchorSet(tuple(anchors), certain_years=(0,))
    return PlanningInstance(
        name=name or f"synthetic-{seed}", years=years, technologies=techs, nodes=tuple(nodes),
        hours=hours, scenarios=build_set(anchor_set, factors), fuels=fuels, sectors=SECTORS,
        interconnectors=tuple(links), certain_years=(years[0],), finance=FinanceSettings(),
        anchors=anchor_set, factors=tuple(factors),
    ).validate()


def hedging_instance(n_hours: int = 8, factors=DEFAULT_FACTORS) -> PlanningInstance:
    """One node choosing between cheap lignite and capital-heavy nuclear.

    An existing lignite fleet covers the certain first year and retires before
    2030, when all new capacity is built. Both plants have full availability, so
    the built total equals the 2030 peak, which is the same in every future; the
    anchors differ in off-peak demand, and the high-CO2 anchor has the lowest.
    """
    techs = (
        Technology("lignite", TechKind.THERMAL, "lignite", 0.40, 0.36, 1.6e6, 40, True, 2.0),
        Technology("nuclear", TechKind.THERMAL, "uranium", 0.33, 0.0, 7.0e6, 50, True, 4.0),
    )
    years = (2020, 2030)
    hours = tuple(Hour(8760.0 / n_hours, 1 + (12 * t) // n_hours) for t in range(n_hours))
    shape = np.linspace(1.0, 0.35, n_hours)
    node = Node(name="N1", shares={"commerce": 0.3, "households": 0.3, "industry": 0.4},
                existing={"lignite": (100.0, 0.0)},
                x_max={"lignite": (0.0, 1000.0), "nuclear": (0.0, 1000.0)},
                vola={"commerce": 3000.0, "households": 6000.0, "industry": 1000.0})
    anchors = []
    for label, growth, co2 in (("DG", 1.04, 50.0), ("EUCO", 1.02, 28.8), ("ST", 1.00, 89.9)):
        later = 100.0 * growth * shape
        later[0] = 104.0  # same peak in every future
        demand = np.array([[100.0 * shape, later]])
        anchors.append(Scenario(
            name=label, demand=demand, res_capacity=np.zeros((1, 2, 2)),
            fuel_price=np.array([[4.0, 4.0], [3.0, 3.0]]), co2_price=np.array([25.0, co2]),
        ))
    check_anchor_structure(anchors)
    anchor_set = AnchorSet(tuple(anchors), certain_years=(0,))
    return PlanningInstance(
        name="hedging", years=years, technologies=techs, nodes=(node,), hours=hours,
        scenarios=build_set(anchor_set, factors), fuels=("lignite", "uranium"),
        sectors=SECTORS, certain_years=(2020,), anchors=anchor_set, factors=tuple(factors),
    ).validate()


def interconnect_instance(n_hours: int = 6, factors=DEFAULT_FACTORS) -> PlanningInstance:
    """Two nodes whose residual loads peak in different hours.

    N1 holds emission-free nuclear and little else; N2 relies on lignite and
    gas. Expanding the link shares both peak capacity and low-carbon energy, and
    the latter grows in value with the CO2 price.
    """
    psp = _tech(_CATALOG[4])
    techs = tuple(_tech(_CATALOG[k]) for k in (0, 1, 3)) + (
        Technology(psp.name, psp.kind, None, psp.efficiency, 0.0, 600e3, psp.lifetime, True),
    )
    years = (2020, 2030)
    hours = tuple(Hour(8760.0 / n_hours, 1 + (12 * t) // n_hours) for t in range(n_hours))
    t = np.arange(n_hours)
    wave = np.cos(2.0 * np.pi * t / n_hours)
    shape1 = 0.7 + 0.3 * wave
    shape2 = 0.7 - 0.3 * wave
    shares = {"commerce": 0.3, "households": 0.3, "industry": 0.4}
    vola = {"commerce": 3000.0, "households": 6000.0, "industry": 1000.0}
    n1 = Node("N1", existing={"nuclear": (900.0, 900.0), "ocgt": (100.0, 100.0), "psp": (0.0, 0.0)},
              x_max={"lignite": (0.0, 0.0), "nuclear": (0.0, 0.0)},
              z_max=400.0, shares=shares, vola=vola)
    n2 = Node("N2", existing={"lignite": (700.0, 500.0), "ocgt": (300.0, 200.0), "psp": (0.0, 0.0)},
              x_max={"nuclear": (0.0, 0.0)},
              z_max=400.0, shares=shares, vola=vola)
    links = (Interconnector("N1", "N2", (100.0, 100.0), capex=600e3),
             Interconnector("N2", "N1", (100.0, 100.0), capex=600e3))
    anchors = []
    for label, growth, co2, gas in (("DG", 1.02, 50.0, 25.0), ("EUCO", 1.01, 28.8, 22.0),
                                    ("ST", 1.00, 89.9, 30.0)):
        demand = np.array([[800.0 * shape1, 800.0 * growth * shape1],
                           [900.0 * shape2, 900.0 * growth * shape2]])
        anchors.append(Scenario(
            name=label, demand=demand, res_capacity=np.zeros((2, 4, 2)),
            fuel_price=np.array([[20.0, gas], [4.0, 4.0], [3.0, 3.0]]),
            co2_price=np.array([25.0, co2]),
        ))
    check_anchor_structure(anchors)
    anchor_set = AnchorSet(tuple(anchors), certain_years=(0,))
    return PlanningInstance(
        name="interconnect", years=years, technologies=techs, nodes=(n1, n2), hours=hours,
        scenarios=build_set(anchor_set, factors), fuels=("gas", "lignite", "uranium"),
        sectors=SECTORS, interconnectors=links, certain_years=(2020,), anchors=anchor_set,
        factors=tuple(factors),
    ).validate()
