"""Risk-averse generation, storage and interconnector expansion planning.

A two-stage stochastic LP: capacity decisions are taken once, dispatch and
demand shedding adapt per scenario, and the objective trades expected
operating cost against its conditional value at risk.
"""

from .core import (
    FLEX_SETTINGS, INTERPLAY_PAIRS, OMEGA_GRID, FinanceSettings, FlexibilitySettings, Hour,
    Interconnector, Node, RiskSettings, Technology, TechKind, annuity, discount_factor,
    flex_setting, marginal_cost,
)
from .estimator import RiskAversePlanner
from .instance import InstanceError, PlanningInstance, Violation
from .io import instance_from_dict, instance_to_dict, load_instance, save_instance
from .model import IntegrityError, PlanSolution, build, fix_first_stage, solve_model
from .report import (
    CellResult, ExperimentResult, TailSet, cvar_value, ex_post_cost, sweep, tail_scenarios,
    value_at_risk,
)
from .scenario import DEFAULT_FACTORS, AnchorSet, Scenario, ScenarioSet, blend, build_set
from .solve import SolverOptions, read_interchange, solve, write_interchange
from .synthetic import hedging_instance, interconnect_instance, make_synthetic

__version__ = "0.1.0"

__all__ = [
    "AnchorSet", "CellResult", "DEFAULT_FACTORS", "ExperimentResult", "FLEX_SETTINGS",
    "FinanceSettings", "FlexibilitySettings", "Hour", "INTERPLAY_PAIRS", "InstanceError",
    "IntegrityError", "Interconnector", "Node", "OMEGA_GRID", "PlanSolution", "PlanningInstance",
    "RiskAversePlanner", "RiskSettings", "Scenario", "ScenarioSet", "SolverOptions", "TailSet",
    "TechKind", "Technology", "Violation", "annuity", "blend", "build", "build_set", "cvar_value",
    "discount_factor", "ex_post_cost", "fix_first_stage", "flex_setting", "hedging_instance",
    "instance_from_dict", "instance_to_dict", "interconnect_instance", "load_instance",
    "make_synthetic", "marginal_cost", "read_interchange", "save_instance", "solve", "solve_model",
    "sweep", "tail_scenarios", "value_at_risk", "write_interchange",
]
