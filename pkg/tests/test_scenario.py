import numpy as np
import pytest

from riskexpansion.scenario import (
    DEFAULT_FACTORS, AnchorSet, Scenario, ScenarioSet, blend, build_set, expected_value,
)


def scen(name, value, co2=(10.0, 20.0), first=None):
    """Flat scenario; ``first`` overrides every year-0 entry."""
    ny = len(co2)
    demand = np.full((1, ny, 2), float(value))
    res = np.full((1, 1, ny), float(value))
    fuel = np.full((1, ny), float(value))
    if first is not None:
        demand[:, 0, :] = res[:, :, 0] = fuel[:, 0] = first
    return Scenario(name=name, demand=demand, res_capacity=res, fuel_price=fuel,
                    co2_price=np.array(co2, dtype=float))


def test_blend_reference_values():
    a, b = scen("A", 100), scen("B", 200)
    assert blend(a, b, 0.5).demand[0, 0, 0] == 150
    assert blend(a, b, 1.1).demand[0, 0, 0] == pytest.approx(90)
    assert blend(a, b, -0.1).demand[0, 0, 0] == pytest.approx(210)
    assert blend(a, b, 1.0).same_data(a)
    assert blend(a, b, 0.0).same_data(b)


def test_blend_clamps_negative_values():
    out = blend(scen("A", 100), scen("B", 2000), 1.1)
    assert np.all(out.demand == 0.0)
    assert out.clamped > 0


def test_blend_keeps_certain_years():
    a = scen("A", 100, co2=(10.0, 50.0))
    b = scen("B", 100, co2=(10.0, 90.0))
    out = blend(a, b, 1.1, certain_years=(0,))
    assert out.co2_price[0] == 10.0
    assert out.co2_price[1] == pytest.approx(1.1 * 50 - 0.1 * 90)


def test_expected_value():
    anchors = AnchorSet((scen("A", 100, (0, 89.9)), scen("B", 200, (0, 28.8)), scen("C", 300, (0, 40.0))))
    ev = expected_value(anchors)
    assert ev.demand[0, 0, 0] == pytest.approx(200)
    assert ev.co2_price[1] == pytest.approx((118.7 + 40.0) / 3)
    zero = AnchorSet((scen("A", 0), scen("B", 0), scen("C", 0)))
    assert np.all(expected_value(zero).demand == 0)


def anchors3(certain=(0,)):
    return AnchorSet((scen("ST", 90, (5, 89.9), 100), scen("DG", 120, (5, 50.0), 100),
                      scen("EUCO", 105, (5, 28.8), 100)), certain)


def test_build_set_counts():
    full = build_set(anchors3())
    assert len(full) == 22
    assert np.all(full.probabilities == 1.0 / 22)
    assert len(build_set(anchors3(), (0.5,))) == 10
    for s in full:
        assert s.demand[0, 0, 0] == 100.0 and s.co2_price[0] == 5.0


def test_ev_of_equal_entries_is_exact():
    anchors = AnchorSet((scen("A", 0.1), scen("B", 0.1), scen("C", 0.1)))
    assert np.all(expected_value(anchors).demand == 0.1)


def test_build_set_order_and_names():
    names = build_set(anchors3()).names
    assert names[:3] == ["DG", "EUCO", "ST"]
    assert names[3] == "DG|EUCO@-0.1"
    assert names[18] == "EV"
    assert names[-3:] == ["DG|EV@0.5", "EUCO|EV@0.5", "ST|EV@0.5"]


def test_identical_anchors_give_identical_scenarios():
    same = AnchorSet((scen("A", 7), scen("B", 7), scen("C", 7)))
    s = build_set(same)
    assert len(s) == 22
    assert all(x.same_data(s[0]) for x in s)
    with pytest.warns(UserWarning):
        d = build_set(same, deduplicate=True)
    assert d.deduplicated and len(d) == 1


def test_duplicate_factors_rejected():
    with pytest.raises(ValueError):
        build_set(anchors3(), (0.5, 0.5))


def test_anchor_set_checks():
    with pytest.raises(ValueError):
        AnchorSet((scen("A", 1), scen("B", 1)))
    with pytest.raises(ValueError):
        AnchorSet((scen("A", 1), scen("A", 2), scen("C", 3)))
    with pytest.raises(ValueError, match="first-stage"):
        AnchorSet((scen("A", 1), scen("B", 2), scen("C", 3)), certain_years=(0,))
    bad = Scenario("X", np.zeros((2, 2, 2)), np.zeros((1, 1, 2)), np.zeros((1, 2)), np.zeros(2))
    with pytest.raises(ValueError, match="index mismatch"):
        AnchorSet((scen("A", 1), scen("B", 1), bad))


def test_scenario_set_checks():
    with pytest.raises(ValueError):
        ScenarioSet(())
    with pytest.raises(ValueError):
        ScenarioSet((scen("A", 1),) * 1 + (scen("B", 1),))  # probabilities sum to 2
    with pytest.raises(ValueError):
        ScenarioSet.uniform([scen("A", 1), scen("A", 2)])


def test_scenario_arrays_are_read_only():
    s = scen("A", 1)
    with pytest.raises(ValueError):
        s.demand[0, 0, 0] = 5.0


def test_default_factors():
    assert DEFAULT_FACTORS == (-0.10, 0.33, 0.50, 0.67, 1.10)
