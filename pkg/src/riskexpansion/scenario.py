"""Scenario construction by linear inter- and extrapolation of anchor futures.

Every scenario stores the four uncertain parameter groups as arrays whose
axes follow the instance's ordered index sets:

``demand``        (node, year, hour)   MWh per hour
``res_capacity``  (node, tech, year)   MW, only read for intermittent RES
``fuel_price``    (fuel, year)         EUR/MWh of fuel
``co2_price``     (year,)              EUR/t
"""

from __future__ import annotations

import itertools
import warnings
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

import numpy as np

DEFAULT_FACTORS = (-0.10, 0.33, 0.50, 0.67, 1.10)
FIELDS = ("demand", "res_capacity", "fuel_price", "co2_price")


def _frozen(a) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class Scenario:
    name: str
    demand: np.ndarray
    res_capacity: np.ndarray
    fuel_price: np.ndarray
    co2_price: np.ndarray
    probability: float = 1.0
    variable_cost: Optional[np.ndarray] = None  # (tech, node, year); NaN entries are composed
    clamped: int = 0

    def __post_init__(self):
        for name in FIELDS:
            object.__setattr__(self, name, _frozen(getattr(self, name)))
        if self.variable_cost is not None:
            object.__setattr__(self, "variable_cost", _frozen(self.variable_cost))
        if not 0.0 <= self.probability <= 1.0:
            raise ValueError(f"scenario {self.name}: probability {self.probability} outside [0, 1]")
        if self.demand.ndim != 3 or self.res_capacity.ndim != 3:
            raise ValueError(f"scenario {self.name}: demand and res_capacity must be 3-d")
        if self.fuel_price.ndim != 2 or self.co2_price.ndim != 1:
            raise ValueError(f"scenario {self.name}: fuel_price must be 2-d, co2_price 1-d")

    def arrays(self):
        out = [getattr(self, name) for name in FIELDS]
        if self.variable_cost is not None:
            out.append(self.variable_cost)
        return out

    def same_data(self, other: "Scenario") -> bool:
        a, b = self.arrays(), other.arrays()
        return len(a) == len(b) and all(np.array_equal(x, y, equal_nan=True) for x, y in zip(a, b))

    def check_compatible(self, other: "Scenario"):
        if (self.variable_cost is None) != (other.variable_cost is None):
            raise ValueError(f"{self.name} and {other.name}: variable_cost present in only one")
        for name, x, y in zip(FIELDS + ("variable_cost",), self.arrays(), other.arrays()):
            if x.shape != y.shape:
                raise ValueError(
                    f"index mismatch in {name}: {self.name} {x.shape} vs {other.name} {y.shape}"
                )

    def with_certain_years(self, source: "Scenario", certain: Sequence[int]) -> "Scenario":
        """Copy the first-stage year slices from ``source``."""
        self.check_compatible(source)
        idx = list(certain)
        if not idx:
            return self
        demand = np.array(self.demand)
        res = np.array(self.res_capacity)
        fuel = np.array(self.fuel_price)
        co2 = np.array(self.co2_price)
        demand[:, idx, :] = source.demand[:, idx, :]
        res[:, :, idx] = source.res_capacity[:, :, idx]
        fuel[:, idx] = source.fuel_price[:, idx]
        co2[idx] = source.co2_price[idx]
        vc = None
        if self.variable_cost is not None:
            vc = np.array(self.variable_cost)
            vc[:, :, idx] = source.variable_cost[:, :, idx]
        return replace(self, demand=demand, res_capacity=res, fuel_price=fuel,
                       co2_price=co2, variable_cost=vc)


@dataclass(frozen=True)
class AnchorSet:
    """Three anchor futures; their first-stage years must already agree."""

    anchors: tuple
    certain_years: tuple = ()  # positional year indices that carry no uncertainty

    def __post_init__(self):
        if len(self.anchors) != 3:
            raise ValueError(f"expected exactly three anchor scenarios, got {len(self.anchors)}")
        names = [a.name for a in self.anchors]
        if len(set(names)) != 3:
            raise ValueError(f"anchor names must be unique, got {names}")
        first = self.anchors[0]
        for other in self.anchors[1:]:
            first.check_compatible(other)
            if not _certain_equal(first, other, self.certain_years):
                raise ValueError(f"anchors {first.name} and {other.name} disagree on first-stage years")

    def sorted(self) -> list:
        return sorted(self.anchors, key=lambda s: s.name)


@dataclass(frozen=True)
class ScenarioSet:
    scenarios: tuple
    deduplicated: bool = False
    clamped: int = field(default=0)

    def __post_init__(self):
        if not self.scenarios:
            raise ValueError("empty scenario set")
        total = sum(s.probability for s in self.scenarios)
        if abs(total - 1.0) > 1e-12:
            raise ValueError(f"scenario probabilities sum to {total!r}, not 1")
        names = [s.name for s in self.scenarios]
        if len(set(names)) != len(names):
            raise ValueError("scenario names must be unique")

    def __len__(self):
        return len(self.scenarios)

    def __iter__(self):
        return iter(self.scenarios)

    def __getitem__(self, i):
        return self.scenarios[i]

    @property
    def names(self) -> list:
        return [s.name for s in self.scenarios]

    @property
    def probabilities(self) -> np.ndarray:
        return np.array([s.probability for s in self.scenarios])

    @classmethod
    def uniform(cls, scenarios: Sequence[Scenario], **kw) -> "ScenarioSet":
        p = 1.0 / len(scenarios)
        return cls(tuple(replace(s, probability=p) for s in scenarios), **kw)


def _certain_equal(a: Scenario, b: Scenario, certain) -> bool:
    idx = list(certain)
    if not idx:
        return True
    pairs = [
        (a.demand[:, idx, :], b.demand[:, idx, :]),
        (a.res_capacity[:, :, idx], b.res_capacity[:, :, idx]),
        (a.fuel_price[:, idx], b.fuel_price[:, idx]),
        (a.co2_price[idx], b.co2_price[idx]),
    ]
    if a.variable_cost is not None:
        pairs.append((a.variable_cost[:, :, idx], b.variable_cost[:, :, idx]))
    return all(np.array_equal(x, y, equal_nan=True) for x, y in pairs)


def _mix(x: np.ndarray, y: np.ndarray, lam: float):
    # equal entries stay bit-identical instead of picking up rounding error
    out = np.where(x == y, x, lam * x + (1.0 - lam) * y)
    neg = out < 0
    out[neg] = 0.0
    return out, int(neg.sum())


def blend(a: Scenario, b: Scenario, lam: float, certain_years=(), name: str | None = None) -> Scenario:
    """Element-wise ``lam * a + (1 - lam) * b``, clamped at zero.

    First-stage year slices are copied from ``a`` unchanged.
    """
    a.check_compatible(b)
    clamped = 0
    mixed = {}
    for field_name in FIELDS:
        mixed[field_name], n = _mix(getattr(a, field_name), getattr(b, field_name), lam)
        clamped += n
    vc = None
    if a.variable_cost is not None:
        vc, n = _mix(a.variable_cost, b.variable_cost, lam)
        clamped += n
    if name is None:
        name = f"{a.name}|{b.name}@{lam:g}"
    out = Scenario(name=name, variable_cost=vc, probability=a.probability, clamped=clamped, **mixed)
    return out.with_certain_years(a, certain_years)


def _mean3(a, b, c):
    same = (a == b) & (b == c)
    return np.where(same, a, (a + b + c) / 3.0)


def expected_value(anchors: AnchorSet, name: str = "EV") -> Scenario:
    """Element-wise mean of the three anchors."""
    items = anchors.anchors
    mean = {f: _mean3(*(getattr(s, f) for s in items)) for f in FIELDS}
    vc = None
    if items[0].variable_cost is not None:
        vc = _mean3(*(s.variable_cost for s in items))
    out = Scenario(name=name, variable_cost=vc, **mean)
    # the mean of bit-identical slices need not be bit-identical to them
    return out.with_certain_years(items[0], anchors.certain_years)


def build_set(anchors: AnchorSet, factors: Sequence[float] = DEFAULT_FACTORS,
              deduplicate: bool = False) -> ScenarioSet:
    """The anchors, every pair blended at each factor, the EV, and anchor/EV midpoints.

    Pairs are oriented by sorted anchor name; the factor weights the first anchor.
    With the default factors this yields 3 + 15 + 1 + 3 = 22 equiprobable scenarios.
    """
    factors = tuple(float(f) for f in factors)
    if len(set(factors)) != len(factors):
        raise ValueError(f"duplicate blending factors: {factors}")
    certain = anchors.certain_years
    ordered = anchors.sorted()
    out = list(ordered)
    for a, b in itertools.combinations(ordered, 2):
        for lam in factors:
            out.append(blend(a, b, lam, certain))
    ev = expected_value(anchors)
    out.append(ev)
    for a in ordered:
        out.append(blend(a, ev, 0.5, certain, name=f"{a.name}|EV@0.5"))

    dedup = False
    if deduplicate:
        kept = []
        for s in out:
            if any(s.same_data(k) for k in kept):
                dedup = True
                continue
            kept.append(s)
        if dedup:
            warnings.warn(f"removed {len(out) - len(kept)} duplicate scenarios", stacklevel=2)
        out = kept
    clamped = sum(s.clamped for s in out)
    return ScenarioSet.uniform(out, deduplicated=dedup, clamped=clamped)
