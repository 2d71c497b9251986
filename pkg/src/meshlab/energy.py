"""Battery state, linear per-packet decay, depletion test and energy maps."""

import csv
import io
from dataclasses import dataclass, replace

from meshlab.exceptions import ValidationError
from meshlab.formatting import percent as fmt_percent
from meshlab.topology import Role
from meshlab.validation import check_non_negative, check_positive

INITIAL_VOLTAGE = 3.292
THRESHOLD = 1.6
REFERENCE_VOLTAGE = 3.3
CALIBRATION_TRANSMISSIONS = 20000
# end-of-run voltages the default rates are calibrated against
FORWARDER_END_VOLTAGE = 1.3383
MAINTENANCE_END_VOLTAGE = 1.6442


@dataclass(frozen=True)
class Battery:
    voltage: float
    initial_voltage: float = INITIAL_VOLTAGE
    mains_powered: bool = False

    def __post_init__(self):
        check_positive(self.initial_voltage, "initial_voltage")
        if not 0.0 <= self.voltage <= self.initial_voltage:
            raise ValidationError(
                f"voltage {self.voltage} outside [0, {self.initial_voltage}]"
            )

    @classmethod
    def fresh(cls, initial_voltage=INITIAL_VOLTAGE, mains_powered=False):
        return cls(initial_voltage, initial_voltage, mains_powered)

    def drain(self, volts):
        if self.mains_powered or volts == 0:
            return self
        return replace(self, voltage=max(0.0, self.voltage - volts))


@dataclass(frozen=True)
class DecayModel:
    """Per-packet voltage costs by what a node does during one transmission.

    ``delta_forward`` is paid by route intermediates, ``delta_receive`` by the
    destination, ``delta_maintenance`` by routers off the route and
    ``delta_idle`` by end devices off the route. ``delta_receive`` defaults to
    ``delta_maintenance``.
    """

    delta_forward: float = (INITIAL_VOLTAGE - FORWARDER_END_VOLTAGE) / CALIBRATION_TRANSMISSIONS
    delta_maintenance: float = (
        (INITIAL_VOLTAGE - MAINTENANCE_END_VOLTAGE) / CALIBRATION_TRANSMISSIONS
    )
    delta_idle: float | None = None
    delta_receive: float | None = None
    threshold: float = THRESHOLD

    def __post_init__(self):
        if self.delta_idle is None:
            object.__setattr__(self, "delta_idle", 0.5 * self.delta_maintenance)
        if self.delta_receive is None:
            object.__setattr__(self, "delta_receive", self.delta_maintenance)
        for name in ("delta_forward", "delta_maintenance", "delta_idle", "delta_receive"):
            object.__setattr__(self, name, check_non_negative(getattr(self, name), name))
        object.__setattr__(self, "threshold", check_non_negative(self.threshold, "threshold"))
        if not self.delta_forward >= self.delta_maintenance >= self.delta_idle:
            raise ValidationError(
                "decay rates must satisfy delta_forward >= delta_maintenance >= delta_idle"
            )
        if not self.delta_forward >= self.delta_receive >= self.delta_idle:
            raise ValidationError(
                "decay rates must satisfy delta_forward >= delta_receive >= delta_idle"
            )

    @classmethod
    def zero(cls, threshold=THRESHOLD):
        return cls(0.0, 0.0, 0.0, 0.0, threshold)

    def to_dict(self):
        return {
            "delta_forward": self.delta_forward,
            "delta_maintenance": self.delta_maintenance,
            "delta_idle": self.delta_idle,
            "delta_receive": self.delta_receive,
            "threshold": self.threshold,
        }


def fresh_batteries(layout, initial_voltage=INITIAL_VOLTAGE):
    """Full batteries for every node; the coordinator runs from mains."""
    return {
        n.id: Battery.fresh(initial_voltage, mains_powered=n.role is Role.COORDINATOR)
        for n in layout.nodes
    }


def tick_costs(roles, active_route, model, maintained_routes=()):
    """Voltage each node is charged for one data packet, before mains exemption.

    Intermediates of the active route and of every route in
    ``maintained_routes`` pay ``delta_forward``; the active destination pays
    ``delta_receive``; every other router pays ``delta_maintenance`` and every
    other end device ``delta_idle``. The source pays nothing beyond its role
    rate (it is the mains-powered coordinator in every supported scenario).
    """
    forwarding = set(active_route.intermediates)
    for route in maintained_routes:
        forwarding.update(route.intermediates)
    costs = {}
    for node, role in roles.items():
        role = Role(role)
        if node in forwarding:
            costs[node] = model.delta_forward
        elif node == active_route.destination:
            costs[node] = model.delta_receive
        elif role is Role.ROUTER:
            costs[node] = model.delta_maintenance
        elif role is Role.END_DEVICE:
            costs[node] = model.delta_idle
        else:
            costs[node] = 0.0
    return costs


def apply_tick_costs(batteries, roles, active_route, model, maintained_routes=()):
    """Return new batteries after one transmission along ``active_route``."""
    costs = tick_costs(roles, active_route, model, maintained_routes)
    return {n: b.drain(costs.get(n, 0.0)) for n, b in batteries.items()}


def is_depleted(battery, threshold=THRESHOLD):
    return not battery.mains_powered and battery.voltage < threshold


@dataclass(frozen=True)
class EnergyMap:
    entries: dict
    reference: float = REFERENCE_VOLTAGE

    def __getitem__(self, node_id):
        return self.entries[node_id]

    def to_csv(self):
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["node_id", "percent"])
        for node in sorted(self.entries):
            writer.writerow([node, fmt_percent(self.entries[node])])
        return buf.getvalue()


def energy_map(batteries, reference=REFERENCE_VOLTAGE) -> EnergyMap:
    """Remaining charge of each node as a percentage of ``reference`` volts."""
    reference = check_positive(reference, "reference")
    return EnergyMap(
        {n: 100.0 * b.voltage / reference for n, b in sorted(batteries.items())}, reference
    )
