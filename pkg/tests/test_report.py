import csv

import numpy as np
import pytest

from riskexpansion import RiskSettings, build, flex_setting, solve_model, sweep
from riskexpansion.model import PlanSolution
from riskexpansion.report import (
    cvar_objective, cvar_value, ex_post_cost, tail_scenarios, value_at_risk,
)

from helpers import probe_doc
from oracles import cvar_enumeration, cvar_grid, tail_oracle


def plan(oc, probs=None, alpha=0.9):
    oc = np.asarray(oc, dtype=float)
    probs = np.full(oc.size, 1.0 / oc.size) if probs is None else np.asarray(probs, dtype=float)
    return PlanSolution(status="optimal", objective=0.0, ic=0.0, oc=oc, probabilities=probs,
                        scenario_names=[f"s{i}" for i in range(oc.size)], alpha=alpha)


def test_tail_reference_example():
    tail = tail_scenarios(plan([10, 20, 30, 40], alpha=0.75))
    assert tail.strict == ("s3",)
    assert tail.zeta == 30.0
    assert tail.boundary == ("s2",)


def test_tail_all_equal():
    tail = tail_scenarios(plan([5.0] * 4))
    assert tail.strict == () and tail.boundary == ("s0", "s1", "s2", "s3")


def test_tail_small_alpha():
    oc = [3.0, 1.0, 4.0, 1.0, 5.0]
    tail = tail_scenarios(plan(oc, alpha=1e-6))
    expected, zeta = tail_oracle(oc, np.full(5, 0.2), 1e-6, [f"s{i}" for i in range(5)])
    assert set(tail.strict) == expected == {"s0", "s2", "s4"}
    assert zeta == 1.0


def test_cvar_helpers_match_oracles():
    rng = np.random.default_rng(3)
    for _ in range(50):
        n = int(rng.integers(1, 9))
        oc = rng.normal(100, 30, n).round(1)
        p = rng.dirichlet(np.ones(n))
        for alpha in (0.5, 0.9, 0.95):
            expected, zeta = cvar_enumeration(oc, p, alpha)
            assert cvar_value(oc, p, alpha) == pytest.approx(expected, rel=1e-12)
            assert value_at_risk(oc, p, alpha) == zeta
            assert cvar_grid(oc, p, alpha) >= expected - 1e-9
            assert cvar_objective(oc, p, alpha, zeta + 1.0) >= expected - 1e-9


def test_ex_post_identities():
    from riskexpansion import instance_from_dict

    inst = instance_from_dict(probe_doc([100.0, 300.0, 200.0]))
    sol0 = solve_model(build(inst, RiskSettings(0.0), flex_setting("dr-none")))
    assert ex_post_cost(sol0) == pytest.approx(sol0.objective, rel=1e-15)
    single = instance_from_dict(probe_doc([250.0]))
    for w in (0.2, 0.99):
        sol = solve_model(build(single, RiskSettings(w), flex_setting("dr-none")))
        assert ex_post_cost(sol) == pytest.approx(sol.objective, rel=1e-9)


def test_two_scenario_sweep_is_non_decreasing():
    from riskexpansion import instance_from_dict

    doc = probe_doc([400.0, 900.0], x_max=2000.0, capacity=300.0, co2=[50.0])
    doc["technologies"].append({"name": "base", "kind": "thermal", "fuel": "gas", "efficiency": 1.0,
                                "emission_factor": 0.0, "capex": 4e5, "lifetime": 20,
                                "investable": True, "vom": 0.0, "availability": 1.0})
    doc["nodes"][0]["x_max"]["base"] = [2000.0]
    inst = instance_from_dict(doc)
    result = sweep(inst, (0.0, 0.2, 0.4, 0.6, 0.8, 0.99))
    values = result.series("dr-none", "ex_post")
    assert all(b >= a - 1e-9 for a, b in zip(values, values[1:]))


@pytest.fixture(scope="module")
def small_sweep(toy):
    return sweep(toy, (0.0, 0.99), ["dr-none", "dr-mid"])


def test_sweep_bookkeeping(small_sweep, tmp_path):
    assert len(small_sweep.cells) == 4 and not small_sweep.failures
    paths = small_sweep.write_csv(tmp_path)
    assert [p.name for p in paths] == ["costs.csv", "investments.csv", "shedding.csv", "tails.csv",
                                       "deltas.csv", "diagnostics.csv"]
    with open(tmp_path / "costs.csv", encoding="utf-8") as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == 4
    assert list(rows[0]) == ["setting", "omega", "ic", "expected_oc", "cvar", "tc", "ex_post"]
    for r, c in zip(rows, small_sweep.cells):
        assert float(r["tc"]) == c.tc and float(r["ex_post"]) == c.ex_post
    with open(tmp_path / "tails.csv", encoding="utf-8") as fh:
        tails = list(csv.DictReader(fh))
    for r in tails:
        c = small_sweep.cell(r["setting"], float(r["omega"]))
        assert r["scenario"] in c.tail.strict
        assert float(r["a_s"]) > 0


def test_deltas_are_differences(small_sweep):
    rows = small_sweep.deltas({"dr-mid": {"shedding": "dr-none"}})
    assert len(rows) == 2
    for r in rows:
        a = small_sweep.cell("dr-mid", r["omega"]).shedding_total
        b = small_sweep.cell("dr-none", r["omega"]).shedding_total
        assert r["delta"] == a - b
    same = small_sweep.deltas({"dr-mid": {"shedding": "dr-mid"}})
    assert all(abs(r["delta"]) <= 1e-9 for r in same)
    # default pairs need combined settings that were not run
    assert small_sweep.deltas() == []


def test_csv_is_byte_stable(toy, small_sweep, tmp_path):
    again = sweep(toy, (0.0, 0.99), ["dr-none", "dr-mid"])
    small_sweep.write_csv(tmp_path / "a")
    again.write_csv(tmp_path / "b")
    for name in ("costs.csv", "investments.csv", "shedding.csv", "tails.csv", "deltas.csv", "diagnostics.csv"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_failed_cells_are_recorded(hedging):
    def hook(setting, omega, lp):
        if omega == 0.5:
            raise RuntimeError("boom")

    result = sweep(hedging, (0.0, 0.5, 0.99), ["dr-none"], lp_hook=hook)
    assert [c.status for c in result.cells] == ["optimal", "failed", "optimal"]
    assert result.failures[0].error == "boom"
    assert np.isnan(result.cells[1].tc)


def test_unknown_setting(hedging):
    with pytest.raises(KeyError):
        sweep(hedging, (0.0,), ["dr-maximal"])
