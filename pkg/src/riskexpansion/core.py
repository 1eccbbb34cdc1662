"""Domain types and financial arithmetic shared across the package."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Mapping, Optional


class TechKind(str, Enum):
    THERMAL = "thermal"
    PSP = "psp"
    HYDRO_RESERVOIR = "hydro_reservoir"
    INTERMITTENT_RES = "intermittent_res"
    OTHER_RES = "other_res"


# exogenous expansion path, never an investment decision
NON_INVESTABLE_KINDS = (TechKind.INTERMITTENT_RES, TechKind.HYDRO_RESERVOIR)


@dataclass(frozen=True)
class Technology:
    name: str
    kind: TechKind
    fuel: Optional[str] = None
    efficiency: float = 1.0
    emission_factor: float = 0.0  # tCO2 per MWh of fuel
    capex: float = 0.0  # EUR/MW
    lifetime: int = 30
    investable: bool = False
    vom: float = 0.0  # EUR/MWh_el
    availability: float = 1.0  # constant AF when a node has no hourly profile

    def __post_init__(self):
        object.__setattr__(self, "kind", TechKind(self.kind))
        if not 0.0 < self.efficiency <= 1.0:
            raise ValueError(f"{self.name}: efficiency must lie in (0, 1], got {self.efficiency}")
        if self.capex < 0:
            raise ValueError(f"{self.name}: negative capex")
        if self.lifetime < 1:
            raise ValueError(f"{self.name}: lifetime must be >= 1")
        if self.investable and self.kind in NON_INVESTABLE_KINDS:
            raise ValueError(f"{self.name}: {self.kind.value} technologies are not investable")

    @property
    def emission_free(self) -> bool:
        return self.emission_factor == 0.0


@dataclass(frozen=True)
class Node:
    """A market zone.

    ``existing`` and ``x_max`` map technology names to one value per modelled
    year. Technologies missing from ``x_max`` have no investment cap. ``profiles``
    holds hourly availability factors per technology and ``hydro_budget`` the
    monthly full-load hours of hydro reservoirs (month -> hours).
    """

    name: str
    existing: Mapping[str, tuple] = field(default_factory=dict)
    x_max: Mapping[str, tuple] = field(default_factory=dict)
    z_max: float = 0.0
    shares: Mapping[str, float] = field(default_factory=dict)
    vola: Mapping[str, float] = field(default_factory=dict)
    profiles: Mapping[str, tuple] = field(default_factory=dict)
    hydro_budget: Mapping[str, Mapping[int, float]] = field(default_factory=dict)


@dataclass(frozen=True)
class Interconnector:
    source: str
    target: str
    ntc: tuple  # MW per modelled year, directional
    capex: float = 0.0  # EUR/MW
    lifetime: int = 50
    expandable: bool = True

    @property
    def name(self) -> str:
        return f"{self.source}>{self.target}"


@dataclass(frozen=True)
class Hour:
    weight: float
    month: int


@dataclass(frozen=True)
class RiskSettings:
    omega: float = 0.0
    alpha: float = 0.9

    def __post_init__(self):
        if not 0.0 <= self.omega <= 1.0:
            raise ValueError(f"omega must lie in [0, 1], got {self.omega}")
        if not 0.0 < self.alpha < 1.0:
            raise ValueError(f"alpha must lie in (0, 1), got {self.alpha}")


@dataclass(frozen=True)
class FinanceSettings:
    interest_rate: float = 0.06
    discount_rate: float = 0.06
    base_year: int = 2020

    def __post_init__(self):
        for name in ("interest_rate", "discount_rate"):
            rate = getattr(self, name)
            if not 0.0 <= rate < 1.0:
                raise ValueError(f"{name} must lie in [0, 1), got {rate}")


@dataclass(frozen=True)
class FlexibilitySettings:
    """Which flexibility elements the planner may use.

    ``None`` switches an element off; a number is the scale factor applied to
    the VoLA merit order (demand response) or to the capex (NTC, PSP).
    Without demand response, unmet demand is priced at ``lost_load_penalty``;
    set it to ``None`` to forbid lost load altogether.
    """

    demand_response: Optional[float] = None
    ntc_expansion: Optional[float] = None
    psp_expansion: Optional[float] = None
    europe_average_vola: bool = False
    lost_load_penalty: Optional[float] = 50_000.0
    symmetric_ntc: bool = False

    def __post_init__(self):
        for name in ("demand_response", "ntc_expansion", "psp_expansion"):
            value = getattr(self, name)
            if value is not None and not value > 0:
                raise ValueError(f"{name} scale factor must be > 0, got {value}")
        if self.lost_load_penalty is not None and self.lost_load_penalty <= 0:
            raise ValueError("lost_load_penalty must be positive")


FLEX_SETTINGS = {
    "dr-none": FlexibilitySettings(europe_average_vola=True),
    "dr-low": FlexibilitySettings(demand_response=5.0, europe_average_vola=True),
    "dr-mid": FlexibilitySettings(demand_response=1.0, europe_average_vola=True),
    "dr-high": FlexibilitySettings(demand_response=0.5, europe_average_vola=True),
    "ntc-none": FlexibilitySettings(),
    "ntc-full": FlexibilitySettings(ntc_expansion=1.0),
    "ntc-half": FlexibilitySettings(ntc_expansion=0.5),
    "psp-none": FlexibilitySettings(),
    "psp-full": FlexibilitySettings(psp_expansion=1.0),
    "psp-half": FlexibilitySettings(psp_expansion=0.5),
    "flex-moderate": FlexibilitySettings(
        demand_response=1.0, ntc_expansion=1.0, psp_expansion=1.0, europe_average_vola=True
    ),
    "flex-high": FlexibilitySettings(
        demand_response=0.5, ntc_expansion=0.5, psp_expansion=0.5, europe_average_vola=True
    ),
}

# combined setting -> isolated runs its utilisation is compared against
INTERPLAY_PAIRS = {
    "flex-moderate": {"shedding": "dr-mid", "ntc": "ntc-full", "psp": "psp-full"},
    "flex-high": {"shedding": "dr-high", "ntc": "ntc-half", "psp": "psp-half"},
}

OMEGA_GRID = (0.0, 0.2, 0.4, 0.6, 0.8, 0.99)


def flex_setting(name: str) -> FlexibilitySettings:
    try:
        return FLEX_SETTINGS[name]
    except KeyError:
        raise ValueError(
            f"unknown flexibility setting {name!r}; choose from {sorted(FLEX_SETTINGS)}"
        ) from None


def annuity(capex: float, rate: float, lifetime: float) -> float:
    """Annual capital charge of ``capex`` repaid over ``lifetime`` years at ``rate``."""
    if capex < 0:
        raise ValueError("capex must be non-negative")
    if lifetime < 1:
        raise ValueError("lifetime must be >= 1")
    if rate < 0:
        raise ValueError("rate must be non-negative")
    if rate == 0:
        return capex / lifetime
    # 1 - (1 + r)^-L without cancellation for small r
    return capex * (rate / -math.expm1(-lifetime * math.log1p(rate)))


def discount_factor(year: int, settings: FinanceSettings) -> float:
    if year < settings.base_year:
        raise ValueError(f"year {year} precedes base year {settings.base_year}")
    return (1.0 + settings.discount_rate) ** -(year - settings.base_year)


def marginal_cost(tech: Technology, fuel_price: float, co2_price: float) -> float:
    """Short-run cost per MWh of electricity: fuel and CO2 per unit output plus O&M."""
    if not tech.efficiency > 0:
        raise ValueError("efficiency must be positive")
    return (fuel_price + co2_price * tech.emission_factor) / tech.efficiency + tech.vom
