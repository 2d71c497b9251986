"""AODV-style route discovery and battery-decay simulation for ZigBee-like mesh networks."""

from meshlab.energy import (
    Battery,
    DecayModel,
    EnergyMap,
    apply_tick_costs,
    energy_map,
    is_depleted,
)
from meshlab.engine import SimConfig, SimReport, compare_placements, run
from meshlab.exceptions import (
    AllRoutesDepleted,
    MeshlabError,
    MissingLayout,
    NoFeasibleLayout,
    NoRoute,
    ParseError,
    ValidationError,
)
from meshlab.routing import (
    Route,
    RouteRequest,
    discover_routes,
    end_to_end_delay,
    on_route_failure,
    process_rreq,
    select_route,
)
from meshlab.scenario import Scenario, ScenarioKind, load_scenario, paper_scenario
from meshlab.topology import (
    LayoutFitter,
    NeighborTable,
    NetworkLayout,
    Node,
    Role,
    build_neighbor_table,
    distance,
    fit_layout,
)

__version__ = "0.1.0"

__all__ = [
    "AllRoutesDepleted",
    "Battery",
    "DecayModel",
    "EnergyMap",
    "LayoutFitter",
    "MeshlabError",
    "MissingLayout",
    "NeighborTable",
    "NetworkLayout",
    "NoFeasibleLayout",
    "NoRoute",
    "Node",
    "ParseError",
    "Role",
    "Route",
    "RouteRequest",
    "Scenario",
    "ScenarioKind",
    "SimConfig",
    "SimReport",
    "ValidationError",
    "apply_tick_costs",
    "build_neighbor_table",
    "compare_placements",
    "discover_routes",
    "distance",
    "end_to_end_delay",
    "energy_map",
    "fit_layout",
    "is_depleted",
    "load_scenario",
    "on_route_failure",
    "paper_scenario",
    "process_rreq",
    "run",
    "select_route",
]
