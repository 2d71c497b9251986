import math

import pytest

from meshlab import DecayModel, SimConfig, compare_placements, paper_scenario, run
from meshlab.engine import ALL_ROUTES_DEPLETED, COMPLETED
from meshlab.exceptions import ValidationError


def expected_failover_tick(model, start=3.292):
    return math.ceil((start - model.threshold) / model.delta_forward)


def test_center_v2_failover_and_final_voltages(center_report):
    report = center_report
    assert report.status == COMPLETED
    assert report.first_failover_tick == expected_failover_tick(report.config.decay)
    assert [a.route.dashed() for a in report.route_history] == ["1-2-8", "1-3-8"]
    v = report.final_voltages()
    assert v[1] == 3.292
    assert v[2] == pytest.approx(1.3383, abs=5e-3)
    for n in (4, 5, 6, 7, 8):
        assert v[n] == pytest.approx(1.6442, abs=1e-4)
    for n in range(9, 16):
        assert v[n] == pytest.approx(2.4681, abs=1e-4)
    assert report.delays == {"1-2-8": pytest.approx(0.04), "1-3-8": pytest.approx(0.04)}


def test_v1_holds_the_first_route():
    report = paper_scenario("center-v1").run()
    assert len(report.route_history) == 1
    assert report.failover_events == []
    assert any(kind == "depleted" for _, kind, _ in report.events)


def test_corner_v2_failover():
    report = paper_scenario("corner-v2").run()
    assert report.route_history[1].route.dashed() == "1-5-4-3-8"
    assert report.route_history[0].route.hop_count == 4


def test_trace_sampling(center_report):
    assert len(center_report.sample_ticks) == 201
    assert center_report.sample_ticks[-1] == 20000
    assert all(len(t) == 201 for t in center_report.voltage_traces.values())


def test_odd_length_run_appends_final_sample(center):
    report = run(center.layout, 1, 8, SimConfig(total_transmissions=250))
    assert report.sample_ticks == [0, 100, 200, 250]


def test_zero_decay_keeps_everything_fresh(center):
    config = SimConfig(total_transmissions=500, decay=DecayModel.zero())
    report = run(center.layout, 1, 8, config)
    assert set(report.final_voltages().values()) == {3.292}


def test_zero_ticks(center):
    report = run(center.layout, 1, 8, SimConfig(total_transmissions=0))
    assert report.ticks_run == 0 and report.sample_ticks == [0]


def test_forwarder_drains_fastest(center_report):
    slopes = {
        n: trace[0] - trace[100] for n, trace in center_report.voltage_traces.items()
    }
    assert max(slopes, key=slopes.get) == 2


def test_runs_are_deterministic(center):
    a, b = center.run(), center.run()
    assert a.summary() == b.summary()
    assert a.voltage_traces == b.voltage_traces


def test_forced_depletion_triggers_failover(center):
    report = run(center.layout, 1, 8, SimConfig(total_transmissions=50), [(10, 2)])
    assert report.first_failover_tick == 10
    assert report.final_voltages()[2] == 0.0
    assert report.active_route.dashed() == "1-3-8"


def test_all_routes_depleted_stops_early(center):
    report = run(center.layout, 1, 8, SimConfig(total_transmissions=50), [(5, 8)])
    assert report.status == ALL_ROUTES_DEPLETED
    assert report.ticks_run == 5


def test_higher_threshold_fails_sooner(center):
    config = SimConfig.from_dict({"threshold": 2.0})
    report = run(center.layout, 1, 8, config)
    assert abs(report.first_failover_tick - expected_failover_tick(config.decay)) <= 1
    assert abs(report.first_failover_tick - 13227) <= 1


def test_config_round_trip_and_rejects_unknown():
    config = SimConfig(total_transmissions=10, failover=False)
    assert SimConfig.from_dict(config.to_dict()) == config
    with pytest.raises(ValidationError):
        SimConfig.from_dict({"bogus": 1})
    with pytest.raises(ValidationError):
        SimConfig.from_dict({"threshold": 4.0})
    assert config.with_overrides(k_routes=3).k_routes == 3


def test_compare_placements(center, corner):
    rows = compare_placements([("corner", corner.layout), ("center", center.layout)], 1, 8)
    assert [r.label for r in rows] == ["center", "corner"]
    assert rows[0].links == 2 and rows[1].links == 4
    assert rows[0].initial_delay == pytest.approx(0.04)
    assert rows[1].initial_delay == pytest.approx(0.08)


def test_identical_layouts_compare_equal(center):
    a, b = compare_placements([("a", center.layout), ("b", center.layout)], 1, 8)
    assert (a.first_route, a.first_failover_tick, a.mean_final_voltage) == (
        b.first_route, b.first_failover_tick, b.mean_final_voltage
    )
    with pytest.raises(ValidationError):
        compare_placements([("a", center.layout)], 1, 8)
