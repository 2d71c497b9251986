import json

import pytest

from meshlab.cli import main
from meshlab.scenario import DATA_DIR


def test_routes(capsys):
    assert main(["routes", "--scenario", "center-v2"]) == 0
    out = capsys.readouterr().out
    assert "222.0656 (First Route)" in out and "308.3401 (Second Route)" in out


def test_routes_csv_and_audit(capsys):
    assert main(["routes", "--scenario", "corner-v2", "--csv", "--k", "3", "--audit-published"]) == 0
    out = capsys.readouterr().out
    assert "1,1-6-7-2-8,4,3,423.6068" in out
    assert "473.081" in out and "653.8844" in out


def test_neighbors(capsys):
    assert main(["neighbors", "--scenario", "center-v1"]) == 0
    assert capsys.readouterr().out.splitlines()[1].split() == ["1", "2", "122.0656", "3.2920"]
    assert main(["neighbors", "--scenario", "center-v2", "--after-run"]) == 0
    assert any(l.split()[:2] == ["2", "1"] and l.split()[3] == "1.3383"
               for l in capsys.readouterr().out.splitlines())


def test_energy_map(capsys):
    assert main(["energy-map", "--scenario", "center-v2"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[1].split() == ["1", "99.758"]


def test_compare(capsys):
    assert main(["compare", "--scenarios", "corner-v2,center-v2"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[1].startswith("center-v2") and lines[2].startswith("corner-v2")


def test_run_is_byte_identical(tmp_path, capsys):
    assert main(["run", "--scenario", "center-v2", "--out", str(tmp_path / "a")]) == 0
    assert main(["run", "--scenario", "center-v2", "--out", str(tmp_path / "b")]) == 0
    for f in sorted((tmp_path / "a").iterdir()):
        assert f.read_bytes() == (tmp_path / "b" / f.name).read_bytes()


def test_out_from_environment(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv("MESHLAB_OUT", str(tmp_path))
    assert main(["run", "--scenario", "random", "--seed", "3"]) in (0, 2)
    assert (tmp_path / "summary.json").is_file()
    assert main(["fit-layout", "--constraints", str(DATA_DIR / "center_constraints.csv")]) == 0
    layout = json.loads((tmp_path / "layout.json").read_text())
    assert layout["nodes"][0]["x"] == 300.0


def test_missing_out_is_usage_error(monkeypatch, capsys):
    monkeypatch.delenv("MESHLAB_OUT", raising=False)
    assert main(["run", "--scenario", "center-v1"]) == 1


def test_bad_flags_exit_1(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["routes", "--bogus"])
    assert exc.value.code == 1
    with pytest.raises(SystemExit) as exc:
        main(["fit-layout", "--constraints", "x.csv", "--anchor", "nope"])
    assert exc.value.code == 1


def test_input_errors_exit_1(tmp_path, capsys):
    assert main(["routes", "--scenario", str(tmp_path / "absent.json")]) == 1
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"label": "b", "layout_file": "center_layout.json", "dst": 99}))
    assert main(["routes", "--scenario", str(bad)]) == 1
    missing = tmp_path / "m.json"
    missing.write_text(json.dumps({"label": "m", "layout_file": "gone.json", "dst": 2}))
    assert main(["routes", "--scenario", str(missing)]) == 1
    assert main(["compare", "--scenarios", "center-v1"]) == 1


def test_no_route_exits_2(tmp_path, capsys):
    path = tmp_path / "split.json"
    path.write_text(json.dumps({
        "label": "split", "dst": 2,
        "layout": {"area_side": 600, "radio_range": 185, "nodes": [
            {"id": 1, "role": "coordinator", "x": 0, "y": 0},
            {"id": 2, "role": "router", "x": 500, "y": 500},
        ]},
    }))
    assert main(["routes", "--scenario", str(path)]) == 2
    assert "NoRoute" in capsys.readouterr().err


def test_infeasible_constraints_exit_2(tmp_path, capsys):
    path = tmp_path / "c.csv"
    path.write_text("node_a,node_b,distance_m\n1,2,10\n2,3,10\n1,3,50\n")
    assert main(["fit-layout", "--constraints", str(path), "--out", str(tmp_path / "l.json")]) == 2


def test_all_routes_depleted_writes_partial_report(tmp_path, capsys):
    path = tmp_path / "f.json"
    path.write_text(json.dumps({
        "label": "f", "layout_file": "center_layout.json", "dst": 8,
        "forced_depletions": [{"tick": 7, "node": 8}],
    }))
    assert main(["run", "--scenario", str(path), "--out", str(tmp_path / "o")]) == 2
    summary = json.loads((tmp_path / "o" / "summary.json").read_text())
    assert summary["status"] == "all_routes_depleted" and summary["ticks_run"] == 7
