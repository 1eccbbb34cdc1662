"""Estimator-style wrapper around build, solve and ex-post evaluation."""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .core import RiskSettings
from .model import build, fix_first_stage, solve_model
from .report import ex_post_cost, tail_scenarios
from .solve import SolverOptions
from .validation import check_alpha, check_flex, check_instance, check_risk


class RiskAversePlanner(BaseEstimator):
    """Risk-averse expansion planner.

    ``fit`` solves the deterministic equivalent for one instance and keeps the
    first-stage plan; ``predict`` re-dispatches an instance against that plan
    and returns per-scenario operating costs; ``score`` is the negative ex-post
    expected total cost of the plan.

    Parameters
    ----------
    omega : float
        Weight of CVaR against the expected operating cost, in [0, 1].
    alpha : float
        CVaR tail level, in (0, 1).
    flex : str or FlexibilitySettings
        Flexibility setting, by name (e.g. ``"dr-mid"``) or as an object.
    method : {"simplex", "highs"}
        LP solver.
    include_cvar : bool
        Keep the CVaR columns and rows; ``False`` needs ``omega == 0``.
    """

    def __init__(self, omega=0.0, alpha=0.9, flex="dr-none", method="simplex", include_cvar=True):
        self.omega = omega
        self.alpha = alpha
        self.flex = flex
        self.method = method
        self.include_cvar = include_cvar

    def _options(self):
        return SolverOptions(method=self.method)

    def fit(self, X, y=None):
        instance = check_instance(X)
        risk = check_risk(self.omega, self.alpha)
        flex = check_flex(self.flex)
        self.lp_ = build(instance, risk, flex, include_cvar=self.include_cvar)
        self.solution_ = solve_model(self.lp_, self._options())
        self.investments_ = dict(self.solution_.investments)
        self.ex_post_ = ex_post_cost(self.solution_)
        self.tail_ = tail_scenarios(self.solution_) if self.solution_.a is not None else None
        self.n_scenarios_ = len(instance.scenarios)
        return self

    def _dispatch(self, X):
        check_is_fitted(self, "investments_")
        instance = check_instance(X)
        lp = build(instance, RiskSettings(0.0, check_alpha(self.alpha)), check_flex(self.flex),
                   include_cvar=False)
        return solve_model(fix_first_stage(lp, self.investments_), self._options())

    def predict(self, X):
        """Per-scenario discounted operating cost under the fitted first stage."""
        return np.array(self._dispatch(X).oc)

    def score(self, X, y=None):
        return -ex_post_cost(self._dispatch(X))
