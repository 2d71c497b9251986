import json

import pytest
from hypothesis import given
from hypothesis import strategies as st

from meshlab import SimConfig, build_neighbor_table, paper_scenario, run
from meshlab.energy import Battery, energy_map
from meshlab.formatting import fixed, meters
from meshlab.report import (
    TableRendering,
    emit_plot_data,
    export_report,
    rank_label,
    render_energy_map,
    render_neighbor_table,
    render_route_summary,
    render_route_table,
)
from meshlab.routing import Route, discover_routes
from meshlab.topology import NeighborTable


def test_neighbour_csv_first_row(center):
    table = build_neighbor_table(center.layout, {n: 3.292 for n in center.layout.ids})
    lines = table.to_csv().splitlines()
    assert lines[0] == "node,neighbor,distance_m,energy_v"
    assert lines[1] == "1,2,122.0656,3.2920"


def test_empty_table_renders_header_only():
    assert NeighborTable().to_csv() == "node,neighbor,distance_m,energy_v\n"
    assert render_neighbor_table(NeighborTable()).to_text() == "NODE  NEIGHBOURS  DISTANCES  ENERGY\n"


def test_center_summary(center):
    text = render_route_summary(discover_routes(center.layout, 1, 8)).to_text()
    assert "Sum   222.0656 (First Route)" in text
    assert "Sum   308.3401 (Second Route)" in text


def test_corner_summary_legs(corner):
    table = render_route_summary(discover_routes(corner.layout, 1, 8, k=1))
    assert [r[1] for r in table.rows] == [
        "100.0000", "111.8034", "111.8034", "100.0000", "423.6068 (First Route)",
    ]


def test_single_leg_summary():
    table = render_route_summary([Route((1, 2), (50.0,))])
    assert table.rows == (("1-2", "50.0000"), ("Sum", "50.0000 (First Route)"))


def test_route_table_and_labels(center):
    csv = render_route_table(discover_routes(center.layout, 1, 8)).to_csv()
    assert csv.splitlines()[1] == "1,1-2-8,2,1,222.0656"
    assert rank_label(3) == "Third Route" and rank_label(9) == "#9 Route"


def test_energy_map_with_positions(center):
    emap = energy_map({1: Battery(1.98), 2: Battery(3.3, 3.3)})
    rows = render_energy_map(emap, center.layout).rows
    assert rows[0] == ("1", "60.000", "300.0000", "300.0000")
    assert rows[1][1] == "100.000"


@pytest.mark.parametrize(
    "value, places, text",
    [(0.00005, 4, "0.0001"), (2.5, 0, "3"), (-0.00001, 4, "0.0000"), (1.0005, 3, "1.001"),
     (float("nan"), 4, "nan")],
)
def test_half_up_rounding(value, places, text):
    assert fixed(value, places) == text


@given(st.floats(0, 1e6))
def test_meters_round_trips_within_half_unit(x):
    assert abs(float(meters(x)) - x) <= 5e-5 + 1e-9 * x


def test_plot_data_v1(tmp_path):
    report = paper_scenario("center-v1").run()
    files = emit_plot_data(report, tmp_path)
    assert [f.name for f in files] == ["energy_map.csv", "voltages.csv"]
    lines = (tmp_path / "voltages.csv").read_text().splitlines()
    assert lines[0] == "tick,node_id,voltage_v"
    assert lines[1] == "0,1,3.2920"
    assert "20000,1,3.2920" in lines


def test_plot_data_v2_final_forwarder(tmp_path, center_report):
    emit_plot_data(center_report, tmp_path)
    lines = (tmp_path / "voltages.csv").read_text().splitlines()
    assert "20000,2,1.3383" in lines


def test_plot_data_zero_ticks(tmp_path, center):
    report = run(center.layout, 1, 8, SimConfig(total_transmissions=0))
    emit_plot_data(report, tmp_path)
    assert len((tmp_path / "voltages.csv").read_text().splitlines()) == 1 + 15


def test_export_is_byte_identical(tmp_path, center):
    export_report(center.run(), tmp_path / "a")
    written = export_report(center.run(), tmp_path / "b")
    assert {p.name for p in written} == {
        "energy_map.csv", "events.csv", "neighbors.csv", "routes.csv", "summary.json", "voltages.csv",
    }
    for p in written:
        assert p.read_bytes() == (tmp_path / "a" / p.name).read_bytes()
    summary = json.loads((tmp_path / "b" / "summary.json").read_text())
    assert summary["failover_events"][0]["depleted"] == [2]


def test_table_alignment():
    table = TableRendering(("a", "bbb"), (("long", "x"),))
    assert table.to_text() == "a     bbb\nlong  x\n"
    assert str(table) == table.to_text()
