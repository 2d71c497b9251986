"""Scenario catalogue (center/corner x version 1/2) and scenario files."""

import json
import random
from dataclasses import dataclass, field
from enum import Enum
from importlib import resources
from pathlib import Path

from meshlab.engine import SimConfig, run
from meshlab.exceptions import MissingLayout, NoRoute, ParseError, ValidationError
from meshlab.routing import discover_routes
from meshlab.topology import (
    DEFAULT_AREA_SIDE,
    DEFAULT_RADIO_RANGE,
    NetworkLayout,
    Node,
    Role,
)

DATA_DIR = resources.files("meshlab") / "data"


class ScenarioKind(str, Enum):
    CENTER_V1 = "center-v1"
    CENTER_V2 = "center-v2"
    CORNER_V1 = "corner-v1"
    CORNER_V2 = "corner-v2"


@dataclass(frozen=True)
class Scenario:
    label: str
    layout: NetworkLayout
    src: int = 1
    dst: int = 8
    config: SimConfig = field(default_factory=SimConfig)
    forced_depletions: tuple = ()
    layout_file: str | None = None

    def __post_init__(self):
        object.__setattr__(
            self, "forced_depletions", tuple((int(t), int(n)) for t, n in self.forced_depletions)
        )
        self.validate()

    def validate(self):
        if self.src not in self.layout:
            raise ValidationError(f"scenario {self.label!r}: src {self.src} is not in the layout")
        if self.layout.role(self.src) is not Role.COORDINATOR:
            raise ValidationError(f"scenario {self.label!r}: src {self.src} is not the coordinator")
        if self.dst not in self.layout:
            raise ValidationError(f"scenario {self.label!r}: dst {self.dst} is not in the layout")
        if self.dst == self.src:
            raise ValidationError(f"scenario {self.label!r}: dst equals src")
        for tick, node in self.forced_depletions:
            if not 1 <= tick <= self.config.total_transmissions:
                raise ValidationError(
                    f"scenario {self.label!r}: forced depletion tick {tick} is outside "
                    f"1..{self.config.total_transmissions}"
                )
            if node not in self.layout:
                raise ValidationError(
                    f"scenario {self.label!r}: forced depletion names unknown node {node}"
                )
            if self.layout.role(node) is Role.COORDINATOR:
                raise ValidationError(
                    f"scenario {self.label!r}: the mains-powered coordinator cannot be depleted"
                )

    def run(self):
        return run(self.layout, self.src, self.dst, self.config, self.forced_depletions)

    def to_dict(self):
        out = {"label": self.label}
        if self.layout_file is not None:
            out["layout_file"] = self.layout_file
        else:
            out["layout"] = self.layout.to_dict()
        out["src"] = self.src
        out["dst"] = self.dst
        out["config"] = _config_delta(self.config)
        if self.forced_depletions:
            out["forced_depletions"] = [
                {"tick": t, "node": n} for t, n in self.forced_depletions
            ]
        return out

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2) + "\n"

    def save(self, path):
        Path(path).write_text(self.to_json(), encoding="utf-8", newline="\n")


def _config_delta(config):
    """Only the fields that differ from the defaults, flattened as in scenario files."""
    base = SimConfig().to_dict()
    cur = config.to_dict()
    delta = {}
    for key, value in cur.items():
        if key == "decay":
            for dk, dv in value.items():
                if base["decay"][dk] != dv:
                    delta[dk] = dv
        elif base[key] != value:
            delta[key] = value
    return delta


def scenario_from_dict(data, base_dir=None):
    """Build and validate a :class:`Scenario` from a parsed scenario mapping."""
    if not isinstance(data, dict):
        raise ParseError("scenario file must contain a JSON object")
    try:
        label = str(data["label"])
        src = int(data.get("src", 1))
        dst = int(data["dst"])
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"scenario needs label, src and dst: {exc!r}") from exc
    layout_file = data.get("layout_file")
    if layout_file is not None:
        layout = _load_layout_file(layout_file, base_dir)
    elif "layout" in data:
        layout = NetworkLayout.from_dict(data["layout"])
    else:
        raise ParseError(f"scenario {label!r} needs layout_file or an inline layout")
    config = SimConfig.from_dict(data.get("config") or {})
    try:
        forced = [
            (int(item["tick"]), int(item["node"])) for item in data.get("forced_depletions", [])
        ]
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"forced_depletions entries need tick and node: {exc!r}") from exc
    return Scenario(label, layout, src, dst, config, tuple(forced), layout_file)


def _load_layout_file(name, base_dir):
    candidates = []
    if base_dir is not None:
        candidates.append(Path(base_dir) / name)
    candidates.append(Path(name))
    candidates.append(DATA_DIR / name)
    for path in candidates:
        if path.is_file():
            return NetworkLayout.load(path)
    raise MissingLayout(f"layout file {name!r} not found")


def load_scenario(path):
    """Load a scenario file, or a built-in alias such as ``center-v1``."""
    if str(path) in {k.value for k in ScenarioKind}:
        return paper_scenario(ScenarioKind(str(path)))
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except FileNotFoundError:
        raise ParseError(f"scenario file {path} does not exist") from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: {exc}") from exc
    return scenario_from_dict(data, base_dir=path.parent)


def paper_scenario(kind) -> Scenario:
    """The packaged center/corner scenario for ``kind``.

    Version 1 holds the first route for the whole run; version 2 lets the
    same decay deplete a forwarder and fail over to the next route.
    """
    kind = ScenarioKind(kind)
    resource = DATA_DIR / "scenarios" / f"{kind.value}.json"
    if not resource.is_file():
        raise MissingLayout(f"packaged scenario {kind.value} is missing")
    scenario = scenario_from_dict(json.loads(resource.read_text(encoding="utf-8")))
    scenario.layout.check_census()
    return scenario


def random_layout(
    n_nodes,
    seed,
    n_routers=None,
    area_side=DEFAULT_AREA_SIDE,
    radio_range=DEFAULT_RADIO_RANGE,
):
    """Uniform random placement: node 1 coordinates, then routers, then end devices."""
    if n_nodes < 2:
        raise ValidationError("a random layout needs at least two nodes")
    rng = random.Random(seed)
    if n_routers is None:
        n_routers = max(1, (n_nodes - 1) // 2)
    nodes = []
    for i in range(1, n_nodes + 1):
        if i == 1:
            role = Role.COORDINATOR
        elif i <= n_routers + 1:
            role = Role.ROUTER
        else:
            role = Role.END_DEVICE
        nodes.append(Node(i, role, rng.uniform(0, area_side), rng.uniform(0, area_side)))
    return NetworkLayout(tuple(nodes), area_side, radio_range)


def random_scenario(seed, n_nodes=12, config=None, **layout_kwargs):
    """A random scenario from the coordinator to the highest-numbered node.

    Layouts are redrawn from the same seeded stream until the destination is
    reachable.
    """
    config = config or SimConfig()
    rng = random.Random(seed)
    for _ in range(1000):
        layout = random_layout(n_nodes, rng.getrandbits(32), **layout_kwargs)
        try:
            discover_routes(layout, 1, n_nodes, 1)
        except NoRoute:
            continue
        return Scenario(f"random-{seed}", layout, 1, n_nodes, config)
    raise ValidationError(f"no connected random layout found for seed {seed}")
