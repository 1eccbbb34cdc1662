"""Argument checks shared by the estimator and the command line."""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .core import FLEX_SETTINGS, FlexibilitySettings, RiskSettings
from .instance import PlanningInstance


def check_instance(instance) -> PlanningInstance:
    if not isinstance(instance, PlanningInstance):
        raise TypeError(f"expected a PlanningInstance, got {type(instance).__name__}")
    return instance.validate()


def check_omegas(omegas: Sequence[float]) -> tuple:
    arr = np.asarray(list(omegas), dtype=float)
    if arr.ndim != 1 or arr.size == 0:
        raise ValueError("need at least one omega value")
    if not np.all(np.isfinite(arr)) or np.any((arr < 0.0) | (arr > 1.0)):
        raise ValueError(f"omega values must lie in [0, 1], got {arr.tolist()}")
    return tuple(float(w) for w in arr)


def check_alpha(alpha: float) -> float:
    alpha = float(alpha)
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")
    return alpha


def check_risk(omega: float, alpha: float) -> RiskSettings:
    return RiskSettings(omega=check_omegas([omega])[0], alpha=check_alpha(alpha))


def check_flex(flex) -> FlexibilitySettings:
    """Accept a FlexibilitySettings or the name of a predefined setting."""
    if isinstance(flex, FlexibilitySettings):
        return flex
    if isinstance(flex, str):
        try:
            return FLEX_SETTINGS[flex]
        except KeyError:
            raise ValueError(f"unknown flexibility setting {flex!r}; "
                             f"known: {', '.join(sorted(FLEX_SETTINGS))}") from None
    raise TypeError(f"flex must be a name or FlexibilitySettings, got {type(flex).__name__}")
