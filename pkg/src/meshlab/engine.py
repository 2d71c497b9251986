"""Deterministic time-stepped simulation: one data packet per tick."""

import math
from dataclasses import dataclass, field, fields

import numpy as np

from meshlab.energy import (
    INITIAL_VOLTAGE,
    REFERENCE_VOLTAGE,
    Battery,
    DecayModel,
    energy_map,
    tick_costs,
)
from meshlab.exceptions import AllRoutesDepleted, NoRoute, ValidationError
from meshlab.routing import (
    RoutingTable,
    discover_routes,
    end_to_end_delay,
    on_route_failure,
    select_route,
)
from meshlab.topology import Role, build_neighbor_table

COMPLETED = "completed"
ALL_ROUTES_DEPLETED = "all_routes_depleted"

RADIO_METADATA = {
    "frequency": "2.4 GHz",
    "modulation": "on/off keying",
    "transmit_power_w": 0.01,
    "received_power": "60 dbm",
    "operating_voltage_range_v": [1.65, 3.292],
    "technology": "ZigBee / IEEE 802.15.4",
}


@dataclass(frozen=True)
class SimConfig:
    total_transmissions: int = 20000
    tick_duration: float = 0.02
    bits_per_packet: int = 2000
    initial_voltage: float = INITIAL_VOLTAGE
    reference_voltage: float = REFERENCE_VOLTAGE
    decay: DecayModel = field(default_factory=DecayModel)
    k_routes: int = 2
    sample_stride: int = 100
    failover: bool = True
    metadata: dict = field(default_factory=lambda: dict(RADIO_METADATA))

    def __post_init__(self):
        if int(self.total_transmissions) != self.total_transmissions or self.total_transmissions < 0:
            raise ValidationError("total_transmissions must be a non-negative integer")
        if self.tick_duration <= 0:
            raise ValidationError("tick_duration must be positive")
        if self.k_routes < 1:
            raise ValidationError("k_routes must be >= 1")
        if self.sample_stride < 1:
            raise ValidationError("sample_stride must be >= 1")
        if self.reference_voltage <= 0:
            raise ValidationError("reference_voltage must be positive")
        if not self.decay.threshold < self.initial_voltage:
            raise ValidationError(
                f"threshold {self.decay.threshold} must be below initial voltage "
                f"{self.initial_voltage}"
            )

    @property
    def threshold(self):
        return self.decay.threshold

    @property
    def total_time(self):
        return self.total_transmissions * self.tick_duration

    def to_dict(self):
        out = {f.name: getattr(self, f.name) for f in fields(self) if f.name != "decay"}
        out["decay"] = self.decay.to_dict()
        out["metadata"] = dict(self.metadata)
        return out

    @classmethod
    def from_dict(cls, data):
        """Build a config from a full or partial override mapping.

        A top-level ``threshold`` key, or any ``delta_*`` key, is folded into
        the decay model.
        """
        data = dict(data or {})
        decay = dict(data.pop("decay", None) or {})
        for key in list(data):
            if key == "threshold" or key.startswith("delta_"):
                decay[key] = data.pop(key)
        known = {f.name for f in fields(cls)} - {"decay"}
        unknown = set(data) - known
        if unknown:
            raise ValidationError(f"unknown config keys: {sorted(unknown)}")
        try:
            model = DecayModel(**decay)
        except TypeError as exc:
            raise ValidationError(f"bad decay block: {exc}") from None
        if "metadata" in data:
            data["metadata"] = {**RADIO_METADATA, **data["metadata"]}
        return cls(decay=model, **data)

    def with_overrides(self, **overrides):
        merged = self.to_dict()
        merged.update(overrides)
        return SimConfig.from_dict(merged)


@dataclass(frozen=True)
class RouteActivation:
    tick: int
    route: object
    reason: str  # "initial" or "failover"


@dataclass
class SimReport:
    layout: object
    src: int
    dst: int
    config: SimConfig
    sample_ticks: list
    voltage_traces: dict  # node id -> voltages at sample_ticks
    final_batteries: dict
    final_energy_map: object
    route_history: list
    failover_events: list  # (tick, frozenset of depleted node ids)
    events: list  # (tick, event, detail)
    delays: dict  # dashed path -> seconds
    final_neighbor_table: object
    status: str = COMPLETED
    ticks_run: int = 0

    @property
    def active_route(self):
        return self.route_history[-1].route

    @property
    def first_failover_tick(self):
        return self.failover_events[0][0] if self.failover_events else None

    def final_voltages(self):
        return {n: b.voltage for n, b in self.final_batteries.items()}

    def summary(self):
        return {
            "src": self.src,
            "dst": self.dst,
            "status": self.status,
            "ticks_run": self.ticks_run,
            "config": self.config.to_dict(),
            "route_history": [
                {
                    "tick": a.tick,
                    "reason": a.reason,
                    "path": a.route.dashed(),
                    "links": a.route.hop_count,
                    "total_distance_m": a.route.total_distance,
                }
                for a in self.route_history
            ],
            "failover_events": [
                {"tick": t, "depleted": sorted(nodes)} for t, nodes in self.failover_events
            ],
            "delays_s": dict(self.delays),
            "final_voltages_v": {str(n): v for n, v in sorted(self.final_voltages().items())},
        }


def run(layout, src, dst, config=None, forced_depletions=()) -> SimReport:
    """Simulate ``config.total_transmissions`` packets from ``src`` to ``dst``.

    Each tick delivers one packet on the active route, charges every node its
    per-packet cost, then checks the active route's battery-powered nodes.
    A depleted node triggers rediscovery that takes effect from the next
    tick; routes that were active before keep their forwarders' drain. If no
    admissible route remains the run stops early with status
    ``all_routes_depleted``.

    ``forced_depletions`` is a sequence of ``(tick, node_id)``; the node's
    battery is emptied at the start of that tick.

    Raises ``NoRoute`` if no route exists at tick 0.
    """
    config = config or SimConfig()
    model = config.decay
    threshold = model.threshold
    ids = layout.ids
    col = {n: i for i, n in enumerate(ids)}
    roles = {n.id: n.role for n in layout.nodes}
    mains = np.array([roles[n] is Role.COORDINATOR for n in ids])
    volts = np.full(len(ids), float(config.initial_voltage))
    forced = {}
    for tick, node in forced_depletions:
        if node not in layout:
            raise ValidationError(f"forced depletion names unknown node {node}")
        forced.setdefault(int(tick), []).append(node)

    table = RoutingTable()
    table.install(src, dst, discover_routes(layout, src, dst, config.k_routes))
    batteries = _batteries(ids, volts, mains, config.initial_voltage)
    active = select_route(table.candidates(src, dst), batteries, threshold)
    table.activate(src, dst, active)
    history = [RouteActivation(0, active, "initial")]
    events = [(0, "route_activated", f"initial {active.dashed()}")]
    failovers = []
    maintained = []
    announced = set()

    def drain_vector():
        costs = tick_costs(roles, active, model, maintained)
        vec = np.array([costs[n] for n in ids])
        vec[mains] = 0.0
        return vec

    drain = drain_vector()
    stride = config.sample_stride
    sample_ticks = [0]
    samples = [volts.copy()]
    status = COMPLETED
    tick = 0
    for tick in range(1, config.total_transmissions + 1):
        for node in forced.get(tick, ()):
            if not mains[col[node]]:
                volts[col[node]] = 0.0
                events.append((tick, "forced_depletion", str(node)))
        volts = np.maximum(volts - drain, 0.0)
        if tick % stride == 0:
            sample_ticks.append(tick)
            samples.append(volts.copy())

        on_route = [n for n in active.path[1:] if not mains[col[n]]]
        low = [n for n in on_route if volts[col[n]] < threshold]
        if not low:
            continue
        fresh = sorted(set(low) - announced)
        if fresh:
            announced.update(fresh)
            events.append((tick, "depleted", "-".join(map(str, fresh))))
        if not config.failover:
            continue
        depleted = frozenset(
            n for n in ids if not mains[col[n]] and volts[col[n]] < threshold
        )
        try:
            replacement = on_route_failure(layout, src, dst, depleted, config.k_routes)
        except AllRoutesDepleted as exc:
            failovers.append((tick, depleted))
            events.append((tick, "all_routes_depleted", str(exc)))
            status = ALL_ROUTES_DEPLETED
            break
        failovers.append((tick, depleted))
        maintained.append(active)
        active = replacement
        table.activate(src, dst, active)
        history.append(RouteActivation(tick, active, "failover"))
        events.append((tick, "failover", active.dashed()))
        drain = drain_vector()

    if sample_ticks[-1] != tick:
        sample_ticks.append(tick)
        samples.append(volts.copy())
    matrix = np.array(samples)
    traces = {n: [float(v) for v in matrix[:, col[n]]] for n in ids}
    batteries = _batteries(ids, volts, mains, config.initial_voltage)
    unique_routes = {a.route.dashed(): a.route for a in history}
    return SimReport(
        layout=layout,
        src=src,
        dst=dst,
        config=config,
        sample_ticks=sample_ticks,
        voltage_traces=traces,
        final_batteries=batteries,
        final_energy_map=energy_map(batteries, config.reference_voltage),
        route_history=history,
        failover_events=failovers,
        events=events,
        delays={
            name: end_to_end_delay(route, config.tick_duration)
            for name, route in unique_routes.items()
        },
        final_neighbor_table=build_neighbor_table(
            layout, {n: b.voltage for n, b in batteries.items()}
        ),
        status=status,
        ticks_run=tick,
    )


def _batteries(ids, volts, mains, initial_voltage):
    return {
        n: Battery(float(v), initial_voltage, bool(m)) for n, v, m in zip(ids, volts, mains)
    }


@dataclass(frozen=True)
class PlacementRow:
    label: str
    first_route: object = None
    first_route_distance: float = math.inf
    links: int | None = None
    initial_delay: float | None = None
    first_failover_tick: int | None = None
    mean_final_voltage: float | None = None
    status: str = COMPLETED
    error: str | None = None


def compare_placements(layouts, src, dst, config=None):
    """Run every ``(label, layout)`` and rank them by first-route distance.

    A layout with no route is reported with ``status="no_route"`` and sorts last.
    """
    config = config or SimConfig()
    if len(layouts) < 2:
        raise ValidationError("compare_placements needs at least two layouts")
    rows = []
    for label, layout in layouts:
        try:
            report = run(layout, src, dst, config)
        except NoRoute as exc:
            rows.append(PlacementRow(label, status="no_route", error=str(exc)))
            continue
        first = report.route_history[0].route
        battery_volts = [b.voltage for b in report.final_batteries.values() if not b.mains_powered]
        rows.append(
            PlacementRow(
                label=label,
                first_route=first,
                first_route_distance=first.total_distance,
                links=first.hop_count,
                initial_delay=end_to_end_delay(first, config.tick_duration),
                first_failover_tick=report.first_failover_tick,
                mean_final_voltage=float(np.mean(battery_volts)) if battery_volts else None,
                status=report.status,
            )
        )
    return sorted(rows, key=lambda r: (r.first_route_distance, r.label))

