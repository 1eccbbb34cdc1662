import copy
import json

import pytest

from riskexpansion import InstanceError, instance_from_dict, instance_to_dict, load_instance, save_instance
from riskexpansion.cli import bundled_path
from riskexpansion.io import dumps_instance


@pytest.fixture(scope="module")
def toy_doc():
    return json.loads(bundled_path("toy").read_text(encoding="utf-8"))


def codes(doc):
    with pytest.raises(InstanceError) as err:
        instance_from_dict(doc)
    return err.value.codes


def test_bundled_toy_loads(toy):
    assert len(toy.scenarios) == 22
    assert toy.violations() == []
    assert toy.anchors is not None


def test_round_trip(toy, tmp_path):
    path = tmp_path / "toy.json"
    save_instance(toy, path)
    back = load_instance(path)
    assert instance_to_dict(back) == instance_to_dict(toy)
    assert path.read_text(encoding="utf-8") == bundled_path("toy").read_text(encoding="utf-8")
    assert all(a.same_data(b) for a, b in zip(back.scenarios, toy.scenarios))


def test_explicit_scenarios_round_trip(probe):
    inst = instance_from_dict(probe([1.0, 2.0, 3.0], probs=[0.2, 0.3, 0.5]))
    again = instance_from_dict(json.loads(dumps_instance(inst)))
    assert list(again.scenarios.probabilities) == [0.2, 0.3, 0.5]


def test_share_sum(toy_doc):
    doc = copy.deepcopy(toy_doc)
    shares = doc["nodes"][0]["shares"]
    first = sorted(shares)[0]
    shares[first] -= 0.1
    assert "SHARE_SUM" in codes(doc)


def test_unknown_interconnector_node(toy_doc):
    doc = copy.deepcopy(toy_doc)
    doc["interconnectors"][0]["to"] = "Atlantis"
    assert "UNRESOLVED_REF" in codes(doc)


def test_every_violation_is_reported(toy_doc):
    doc = copy.deepcopy(toy_doc)
    doc["hours"][0]["weight"] = 0.0
    doc["hours"][1]["month"] = 13
    doc["nodes"][0]["shares"] = {"industry": 0.5}
    doc["interconnectors"][0]["from"] = "Nowhere"
    found = codes(doc)
    assert {"HOUR_WEIGHT", "MONTH", "SHARE_SUM", "UNRESOLVED_REF"} <= found


def test_schema_errors(toy_doc):
    assert codes({"schema_version": 99}) == {"SCHEMA"}
    doc = copy.deepcopy(toy_doc)
    del doc["hours"]
    assert codes(doc) == {"SCHEMA"}
    doc = copy.deepcopy(toy_doc)
    doc["scenarios"] = {}
    assert "SCHEMA" in codes(doc)


def test_shape_and_length_errors(toy_doc):
    doc = copy.deepcopy(toy_doc)
    anchor = next(iter(doc["scenarios"]["anchors"].values()))
    node = next(iter(anchor["demand"]))
    anchor["demand"][node] = anchor["demand"][node][:1]
    anchor["co2_price"] = [1.0]
    found = codes(doc)
    assert {"SHAPE", "LENGTH"} <= found


def test_certain_year_mismatch(toy_doc):
    doc = copy.deepcopy(toy_doc)
    anchor = next(iter(doc["scenarios"]["anchors"].values()))
    anchor["co2_price"][0] += 1.0
    assert "CERTAIN_MISMATCH" in codes(doc)


def test_bad_probabilities(probe):
    doc = probe([1.0, 2.0], probs=[0.5, 0.6])
    assert "PROBABILITY" in codes(doc)


def test_invalid_json(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text("{not json", encoding="utf-8")
    with pytest.raises(InstanceError) as err:
        load_instance(path)
    assert err.value.codes == {"SCHEMA"}
