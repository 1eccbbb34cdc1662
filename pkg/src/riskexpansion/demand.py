"""Stepwise load-shedding supply functions built from sector shares and VoLA values."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Optional, Sequence

from .core import Node

SHARE_TOL = 1e-9


@dataclass(frozen=True)
class SheddingStep:
    sector: str
    share: float
    vola: float  # EUR/MWh after scaling


@dataclass(frozen=True)
class SheddingMeritOrder:
    steps: Mapping[str, tuple]  # node -> steps sorted by (vola, sector)

    def __bool__(self):
        return bool(self.steps)

    def for_node(self, node: str) -> tuple:
        try:
            return self.steps[node]
        except KeyError:
            raise KeyError(f"no merit order for node {node!r}") from None

    def step(self, node: str, sector: str) -> SheddingStep:
        for st in self.for_node(node):
            if st.sector == sector:
                return st
        raise KeyError(f"node {node!r} has no sector {sector!r}")


def europe_average(nodes: Sequence[Node]) -> dict:
    """Mean VoLA per sector across all nodes that report the sector."""
    sums: dict = {}
    counts: dict = {}
    for node in nodes:
        for sector, value in node.vola.items():
            sums[sector] = sums.get(sector, 0.0) + value
            counts[sector] = counts.get(sector, 0) + 1
    return {k: sums[k] / counts[k] for k in sums}


def build_merit_order(nodes: Sequence[Node], scale: Optional[float],
                      europe_average_vola: bool = False) -> SheddingMeritOrder:
    """Per-node shedding steps sorted by scaled VoLA (ties broken by sector name).

    ``scale=None`` means demand response is off and yields an empty order.
    """
    if scale is None:
        return SheddingMeritOrder({})
    if not scale > 0:
        raise ValueError(f"VoLA scale factor must be positive, got {scale}")
    averaged = europe_average(nodes) if europe_average_vola else None
    steps = {}
    for node in nodes:
        total = sum(node.shares.values())
        if abs(total - 1.0) > SHARE_TOL:
            raise ValueError(f"node {node.name}: sector shares sum to {total}, not 1")
        node_steps = []
        for sector, share in node.shares.items():
            base = averaged[sector] if averaged is not None else node.vola[sector]
            if not base > 0:
                raise ValueError(f"node {node.name}: VoLA of {sector} must be positive")
            node_steps.append(SheddingStep(sector, float(share), float(base) * scale))
        node_steps.sort(key=lambda st: (st.vola, st.sector))
        steps[node.name] = tuple(node_steps)
    return SheddingMeritOrder(steps)


def shed_cap(order: SheddingMeritOrder, node: str, sector: str, demand: float) -> float:
    """Upper bound on sectoral shedding in one hour: demand times the sector share."""
    if demand < 0:
        raise ValueError("demand must be non-negative")
    return demand * order.step(node, sector).share
