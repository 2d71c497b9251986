import json

import pytest

from meshlab import Scenario, ScenarioKind, load_scenario, paper_scenario
from meshlab.exceptions import MissingLayout, ParseError, ValidationError
from meshlab.scenario import random_scenario, scenario_from_dict


@pytest.mark.parametrize("kind", list(ScenarioKind))
def test_packaged_scenarios_run(kind):
    scenario = paper_scenario(kind)
    report = scenario.run()
    assert report.ticks_run == 20000
    assert scenario.config.failover is kind.value.endswith("v2")


def test_alias_and_file_round_trip(tmp_path):
    scenario = load_scenario("corner-v1")
    path = tmp_path / "s.json"
    scenario.save(path)
    assert load_scenario(path) == scenario


def test_inline_layout_round_trip(tmp_path, center):
    data = {**center.to_dict(), "layout": center.layout.to_dict()}
    del data["layout_file"]
    data["forced_depletions"] = [{"tick": 5, "node": 3}]
    path = tmp_path / "inline.json"
    path.write_text(json.dumps(data))
    loaded = load_scenario(path)
    assert loaded.layout == center.layout
    assert loaded.forced_depletions == ((5, 3),)
    assert json.loads(loaded.to_json())["forced_depletions"] == [{"tick": 5, "node": 3}]


def test_threshold_override_in_file(tmp_path):
    path = tmp_path / "t.json"
    path.write_text(json.dumps(
        {"label": "t", "layout_file": "center_layout.json", "dst": 8, "config": {"threshold": 2.0}}
    ))
    scenario = load_scenario(path)
    assert scenario.config.threshold == 2.0
    assert abs(scenario.run().first_failover_tick - 13227) <= 1


@pytest.mark.parametrize(
    "patch",
    [{"dst": 99}, {"dst": 1}, {"src": 2}, {"forced_depletions": [{"tick": 0, "node": 2}]},
     {"forced_depletions": [{"tick": 3, "node": 1}]}],
)
def test_invalid_scenarios(patch):
    data = {"label": "bad", "layout_file": "center_layout.json", "dst": 8, **patch}
    with pytest.raises(ValidationError):
        scenario_from_dict(data)


def test_missing_dst_is_a_parse_error():
    with pytest.raises(ParseError):
        scenario_from_dict({"label": "x", "layout_file": "center_layout.json"})


def test_missing_layout_file():
    with pytest.raises(MissingLayout):
        scenario_from_dict({"label": "x", "layout_file": "nowhere.json", "dst": 2})


def test_unreadable_files(tmp_path):
    with pytest.raises(ParseError):
        load_scenario(tmp_path / "absent.json")
    broken = tmp_path / "broken.json"
    broken.write_text("{not json")
    with pytest.raises(ParseError):
        load_scenario(broken)


def test_random_scenarios_are_seeded():
    assert random_scenario(5) == random_scenario(5)
    assert random_scenario(5).layout != random_scenario(6).layout
    scenario = random_scenario(11, n_nodes=6)
    assert isinstance(scenario, Scenario) and scenario.dst == 6
