from dataclasses import replace

import numpy as np
import pytest

from riskexpansion import (
    FlexibilitySettings, IntegrityError, RiskSettings, ScenarioSet, build, fix_first_stage,
    flex_setting, instance_from_dict, solve, solve_model,
)
from riskexpansion.core import annuity
from riskexpansion.model import extract, key_name, operating_costs

from helpers import probe_doc
from oracles import cvar_enumeration

NONE = flex_setting("dr-none")


def probe(demands, **kw):
    return instance_from_dict(probe_doc(demands, **kw))


@pytest.mark.parametrize("demand,cap,af", [(500.0, 200.0, 1.0), (500.0, 800.0, 1.0), (300.0, 100.0, 0.8)])
def test_single_node_closed_form(demand, cap, af):
    doc = probe_doc([demand], capacity=cap, x_max=1e4)
    doc["technologies"][0]["availability"] = af
    sol = solve_model(build(instance_from_dict(doc), RiskSettings(0.0), NONE))
    x = sol.investments[("x", "ocgt", "N", 2020)]
    assert x == pytest.approx(max(0.0, demand / af - cap), abs=1e-7)
    expected_ic = annuity(1e5, 0.05, 20) * x
    assert sol.ic == pytest.approx(expected_ic, rel=1e-9, abs=1e-9)
    assert sol.objective == pytest.approx(expected_ic + demand * 20.0, rel=1e-9)


def test_two_scenario_cvar():
    inst = probe([0.5, 1.5])
    sol = solve_model(build(inst, RiskSettings(1.0, 0.5), NONE))
    np.testing.assert_allclose(sol.oc, [10.0, 30.0])
    assert sol.cvar == pytest.approx(30.0, rel=1e-9)
    assert sol.objective == pytest.approx(30.0, rel=1e-9)


def test_single_scenario_cvar_equals_oc():
    sol = solve_model(build(probe([321.0]), RiskSettings(0.7, 0.9), NONE))
    assert sol.cvar == pytest.approx(sol.oc[0], rel=1e-6)
    assert sol.ex_post == pytest.approx(sol.objective, rel=1e-9)


def test_omega_zero_objective_and_cvar_cost(hedging):
    lp = build(hedging, RiskSettings(0.0), NONE)
    assert lp.c[lp.meta.index[("cvar",)]] == 0.0
    sol = solve_model(lp)
    assert sol.objective == pytest.approx(sol.ic + sol.probabilities @ sol.oc, rel=1e-12)


@pytest.mark.parametrize("omega", [0.3, 0.99])
def test_objective_decomposition(hedging, omega):
    sol = solve_model(build(hedging, RiskSettings(omega), NONE))
    parts = sol.ic + (1 - omega) * sol.probabilities @ sol.oc + omega * sol.cvar
    assert parts == pytest.approx(sol.objective, rel=1e-6)
    assert sol.cvar >= sol.expected_oc - 1e-6 * abs(sol.expected_oc)
    oracle, _ = cvar_enumeration(sol.oc, sol.probabilities, sol.alpha)
    assert sol.cvar == pytest.approx(oracle, rel=1e-6)


def test_fix_first_stage_round_trip(interconnect):
    flex = flex_setting("psp-half")
    lp = build(interconnect, RiskSettings(0.4), flex)
    sol = solve_model(lp)
    again = solve_model(fix_first_stage(lp, sol.investments))
    np.testing.assert_allclose(again.oc, sol.oc, rtol=1e-6)
    pinned = fix_first_stage(lp, {key_name(("z", "psp", "N1", 2030)): 5.0})
    j = pinned.column(key_name(("z", "psp", "N1", 2030)))
    assert pinned.col_lo[j] == pinned.col_hi[j] == 5.0


def test_fix_first_stage_errors(hedging):
    lp = build(hedging, RiskSettings(0.0), NONE)
    with pytest.raises(ValueError):
        fix_first_stage(lp, {("x", "nuclear", "N1", 2030): -5.0})
    with pytest.raises(KeyError):
        fix_first_stage(lp, {("g", "nuclear", "N1", 0, 2030, "ST"): 1.0})


def test_pinned_zero_capacity_without_slack_is_infeasible():
    inst = probe([100.0], capacity=0.0, x_max=1e4)
    strict = FlexibilitySettings(lost_load_penalty=None)
    lp = build(inst, RiskSettings(0.0), strict)
    rep = solve(fix_first_stage(lp, {("x", "ocgt", "N", 2020): 0.0}))
    assert rep.status == "infeasible"
    with pytest.raises(RuntimeError):
        solve_model(fix_first_stage(lp, {("x", "ocgt", "N", 2020): 0.0}))


def test_extract_detects_tampering(hedging):
    lp = build(hedging, RiskSettings(0.5), NONE)
    rep = solve(lp)
    x = rep.x.copy()
    x[lp.meta.index[("oc", "ST")]] *= 1.01
    with pytest.raises(IntegrityError):
        extract(lp, x)
    x = rep.x.copy()
    j = next(j for k, j in lp.meta.index.items() if k[0] == "g" and x[j] > 1.0)
    x[j] *= 2.0
    with pytest.raises(IntegrityError):
        extract(lp, x)


def test_energy_balance_and_operating_costs(toy):
    lp = build(toy, RiskSettings(0.6), flex_setting("dr-mid"))
    rep = solve(lp)
    balance = [i for i, n in enumerate(lp.row_names) if n.startswith("balance[")]
    act = lp.A[balance] @ rep.x
    assert np.max(np.abs(act - lp.row_lo[balance])) < 1e-6 * max(1.0, np.abs(lp.row_lo[balance]).max())
    assert np.all(lp.row_lo[balance] == lp.row_hi[balance])
    oc = np.array([rep.x[lp.meta.index[("oc", s)]] for s in lp.meta.scenario_names])
    np.testing.assert_allclose(operating_costs(lp.meta, rep.x), oc, rtol=1e-6)


def test_storage_telescopes_and_flows_respect_caps(interconnect):
    lp = build(interconnect, RiskSettings(0.8), flex_setting("flex-high"))
    sol = solve_model(lp)
    eta = interconnect.tech("psp").efficiency
    d = sol.dispatch
    groups = {}
    for key, v in d.items():
        if key[0] in ("pump", "g") and key[1] == "psp":
            _, _, node, t, year, s = key
            sign = eta if key[0] == "pump" else -1.0
            groups[(node, year, s)] = groups.get((node, year, s), 0.0) + sign * v
    assert groups
    last = len(interconnect.hours) - 1
    for (node, year, s), net in groups.items():
        sl_end = d[("sl", "psp", node, last, year, s)]
        assert net == pytest.approx(sl_end, abs=1e-6 * max(1.0, abs(sl_end)))
    ntc = {ic.name: ic.ntc for ic in interconnect.interconnectors}
    years = list(interconnect.years)
    for key, v in d.items():
        if key[0] == "flow":
            _, link, t, year, s = key
            cap = ntc[link][years.index(year)] + sol.investments.get(("y", link, year), 0.0)
            assert v <= cap + 1e-6


def test_investments_are_irreversible(interconnect):
    sol = solve_model(build(interconnect, RiskSettings(0.99), flex_setting("flex-high")))
    years = list(interconnect.years)
    for key, v in sol.investments.items():
        if key[-1] != years[-1]:
            later = key[:-1] + (years[years.index(key[-1]) + 1],)
            assert sol.investments[later] >= v - 1e-9


def test_scenario_decomposability(hedging):
    lp = build(hedging, RiskSettings(0.0), NONE)
    sol = solve_model(lp)
    for i in (0, 7, 21):
        scen = replace(hedging.scenarios[i], probability=1.0)
        single = hedging.with_scenarios(ScenarioSet((scen,)))
        sub = build(single, RiskSettings(0.0), NONE, include_cvar=False)
        one = solve_model(fix_first_stage(sub, sol.investments))
        assert one.oc[0] == pytest.approx(sol.oc[i], rel=1e-6)


def test_renewable_curtailment_is_free(toy):
    lp = build(toy, RiskSettings(0.0), NONE)
    wind = [j for k, j in lp.meta.index.items() if k[0] == "g" and k[1] == "wind"]
    assert wind and np.all(lp.c[wind] == 0.0)
    assert np.all(lp.col_lo[wind] == 0.0)


def test_build_is_deterministic(toy):
    a = build(toy, RiskSettings(0.4), flex_setting("flex-moderate"))
    b = build(toy, RiskSettings(0.4), flex_setting("flex-moderate"))
    assert a.col_names == b.col_names and a.row_names == b.row_names
    assert (a.A != b.A).nnz == 0 and np.array_equal(a.c, b.c)


def test_build_argument_errors(hedging):
    with pytest.raises(ValueError):
        build(hedging, RiskSettings(0.5), NONE, include_cvar=False)
    with pytest.raises(TypeError):
        build(hedging, 0.5, NONE)


def test_flexibility_switches_columns(interconnect):
    off = build(interconnect, RiskSettings(0.0), flex_setting("ntc-none")).meta.index
    on = build(interconnect, RiskSettings(0.0), flex_setting("flex-high")).meta.index
    fams_off = {k[0] for k in off}
    fams_on = {k[0] for k in on}
    assert "shed" not in fams_off and "shed" in fams_on
    assert "ll" in fams_off
    lp = build(interconnect, RiskSettings(0.0), flex_setting("ntc-none"))
    ys = [j for k, j in lp.meta.index.items() if k[0] == "y"]
    assert all(lp.col_hi[j] == 0.0 for j in ys)
