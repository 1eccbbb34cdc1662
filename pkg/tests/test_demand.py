import pytest

from riskexpansion.core import Node
from riskexpansion.demand import build_merit_order, europe_average, shed_cap


def nodes():
    return [
        Node("A", shares={"s1": 0.4, "s2": 0.6}, vola={"s1": 1000.0, "s2": 500.0}),
        Node("B", shares={"s1": 0.5, "s2": 0.5}, vola={"s1": 3000.0, "s2": 1500.0}),
    ]


def test_merit_order_sorted_by_vola():
    order = build_merit_order(nodes()[:1], 1.0)
    steps = order.for_node("A")
    assert [(s.sector, s.share, s.vola) for s in steps] == [("s2", 0.6, 500.0), ("s1", 0.4, 1000.0)]


def test_merit_order_scaling_keeps_order():
    steps = build_merit_order(nodes()[:1], 5.0).for_node("A")
    assert [(s.sector, s.vola) for s in steps] == [("s2", 2500.0), ("s1", 5000.0)]


def test_off_mode_is_empty():
    order = build_merit_order(nodes(), None)
    assert not order
    with pytest.raises(KeyError):
        order.for_node("A")


def test_europe_average():
    avg = europe_average(nodes())
    assert avg == {"s1": 2000.0, "s2": 1000.0}
    order = build_merit_order(nodes(), 1.0, europe_average_vola=True)
    assert order.step("A", "s1").vola == order.step("B", "s1").vola == 2000.0


def test_shed_cap():
    order = build_merit_order([Node("A", shares={"x": 0.25, "y": 0.0, "z": 0.75},
                                    vola={"x": 1.0, "y": 2.0, "z": 3.0})], 1.0)
    assert shed_cap(order, "A", "x", 100) == 25
    assert shed_cap(order, "A", "y", 100) == 0
    order2 = build_merit_order([Node("A", shares={"x": 0.6, "y": 0.4}, vola={"x": 1.0, "y": 2.0})], 1.0)
    assert shed_cap(order2, "A", "x", 83.5) == pytest.approx(50.1)
    with pytest.raises(ValueError):
        shed_cap(order2, "A", "x", -1.0)


def test_bad_shares_and_scale():
    with pytest.raises(ValueError):
        build_merit_order([Node("A", shares={"x": 0.9}, vola={"x": 1.0})], 1.0)
    with pytest.raises(ValueError):
        build_merit_order(nodes(), 0.0)
