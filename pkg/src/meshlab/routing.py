"""Simplified AODV: request flooding, k-shortest route ranking and failover.

Intermediates must be routers. End devices may be a destination but never
forward, and the coordinator only originates. Sequence numbers, HELLO
beacons and RERR packets are not modelled; the engine's threshold check is
the only failure detector.
"""

import heapq
from dataclasses import dataclass, field

from meshlab.energy import is_depleted
from meshlab.exceptions import AllRoutesDepleted, NoRoute, ValidationError
from meshlab.topology import Role

# totals closer than this are ties, broken by the lexicographically smaller path
TIE_DECIMALS = 6


@dataclass(frozen=True)
class Route:
    """Loop-free path with the length of each link, source first."""

    path: tuple
    link_distances: tuple
    total_distance: float = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "path", tuple(self.path))
        object.__setattr__(self, "link_distances", tuple(self.link_distances))
        if len(self.link_distances) != len(self.path) - 1:
            raise ValidationError("a route needs one link distance per consecutive pair")
        total = 0.0
        for d in self.link_distances:
            total += d
        object.__setattr__(self, "total_distance", total)

    @classmethod
    def from_path(cls, layout, path):
        """Build a route on ``layout``, checking every route invariant."""
        path = tuple(int(n) for n in path)
        if len(path) < 2:
            raise ValidationError(f"a route needs at least two nodes, got {path}")
        if len(set(path)) != len(path):
            raise ValidationError(f"route {path} revisits a node")
        for a, b in zip(path, path[1:]):
            if not layout.in_range(a, b):
                raise ValidationError(f"link {a}-{b} is out of radio range")
        for n in path[1:-1]:
            if layout.role(n) is not Role.ROUTER:
                raise ValidationError(f"node {n} on {path} is not a router and cannot forward")
        return cls(path, tuple(layout.link_distance(a, b) for a, b in zip(path, path[1:])))

    @property
    def source(self):
        return self.path[0]

    @property
    def destination(self):
        return self.path[-1]

    @property
    def hop_count(self):
        """Number of links."""
        return len(self.path) - 1

    @property
    def intermediates(self):
        return self.path[1:-1]

    def legs(self):
        return list(zip(self.path, self.path[1:], self.link_distances))

    def dashed(self):
        return "-".join(str(n) for n in self.path)

    def rank_key(self):
        return (round(self.total_distance, TIE_DECIMALS), self.path)

    def __str__(self):
        return f"{self.dashed()} ({self.total_distance:.4f} m)"


def _check_endpoints(layout, src, dst):
    if src not in layout or dst not in layout:
        raise ValidationError(f"route endpoints {src}->{dst} must both be in the layout")
    if layout.role(src) is not Role.COORDINATOR:
        raise ValidationError(f"source {src} must be the coordinator")
    if src == dst:
        raise ValidationError("source and destination must differ")


def discover_routes(layout, src, dst, k=2, exclude=()):
    """Up to ``k`` loop-free routes ``src -> dst``, shortest first.

    Exhaustive depth-first enumeration over router intermediates, pruned with
    the straight-line distance to ``dst`` as a lower bound once ``k`` routes
    are known. Nodes in ``exclude`` may not forward. Raises ``NoRoute`` when
    no admissible path exists.
    """
    _check_endpoints(layout, src, dst)
    if k < 1:
        raise ValidationError(f"k must be >= 1, got {k}")
    exclude = set(exclude)
    relays = {
        n.id for n in layout.nodes if n.role is Role.ROUTER and n.id not in exclude
    } - {src, dst}
    adjacency = {
        n: sorted(m for m in layout.neighbors(n) if m in relays or m == dst)
        for n in relays | {src}
    }
    target = layout.position(dst)
    best = []  # at most k routes, kept in rank order

    def visit(node, path, links, dist, on_path):
        for nxt in adjacency[node]:
            if nxt in on_path:
                continue
            link = layout.link_distance(node, nxt)
            step = dist + link
            if nxt == dst:
                best.append(Route(path + (nxt,), links + (link,)))
                best.sort(key=Route.rank_key)
                del best[k:]
                continue
            # prune only when even the straight line home cannot tie the k-th route
            if len(best) == k:
                floor = step + _straight(layout.position(nxt), target)
                if floor > best[-1].total_distance + 10**-TIE_DECIMALS:
                    continue
            on_path.add(nxt)
            visit(nxt, path + (nxt,), links + (link,), step, on_path)
            on_path.discard(nxt)

    visit(src, (src,), (), 0.0, {src})
    if not best:
        raise NoRoute(f"no admissible route from {src} to {dst}")
    return best


def _straight(a, b):
    return ((a[0] - b[0]) ** 2 + (a[1] - b[1]) ** 2) ** 0.5


@dataclass(frozen=True)
class RouteRequest:
    origin: int
    destination: int
    request_id: int
    path_so_far: tuple
    accumulated_distance: float = 0.0
    link_distances: tuple = ()

    def __post_init__(self):
        if not self.path_so_far or self.path_so_far[0] != self.origin:
            raise ValidationError("path_so_far must start at the origin")
        if len(set(self.path_so_far)) != len(self.path_so_far):
            raise ValidationError("path_so_far must be loop-free")

    @property
    def sender(self):
        return self.path_so_far[-1]


@dataclass(frozen=True)
class RreqAction:
    """Outcome of handling one RREQ: ``drop``, ``reply`` or ``forward``."""

    kind: str
    route: Route | None = None
    forwards: tuple = ()  # (neighbor, RouteRequest) pairs


def process_rreq(node, rreq, layout, seen, exclude=()):
    """Handle ``rreq`` received by ``node`` from ``rreq.sender``.

    ``seen`` maps node id to the set of ``(origin, request_id)`` pairs it has
    already handled and is updated in place.
    """
    key = (rreq.origin, rreq.request_id)
    node_seen = seen.setdefault(node, set())
    if key in node_seen:
        return RreqAction("drop")
    node_seen.add(key)
    if node in rreq.path_so_far:
        return RreqAction("drop")
    prior = rreq.link_distances
    if len(prior) != len(rreq.path_so_far) - 1:
        prior = tuple(
            layout.link_distance(a, b) for a, b in zip(rreq.path_so_far, rreq.path_so_far[1:])
        )
    link = layout.link_distance(rreq.sender, node)
    path = rreq.path_so_far + (node,)
    links = prior + (link,)
    if node == rreq.destination:
        return RreqAction("reply", route=Route(path, links))
    if layout.role(node) is not Role.ROUTER or node in exclude:
        return RreqAction("drop")
    onward = RouteRequest(
        rreq.origin, rreq.destination, rreq.request_id, path, rreq.accumulated_distance + link, links
    )
    forwards = tuple(
        (m, onward) for m in layout.neighbors(node) if m != rreq.sender and m not in path
    )
    return RreqAction("forward", forwards=forwards)


@dataclass
class FloodResult:
    route: Route | None
    transmissions: int
    replies: list = field(default_factory=list)


def flood_route_request(layout, src, dst, request_id=1, exclude=()):
    """Event-driven RREQ flood; link delay is proportional to link length.

    Deliveries are processed in order of accumulated distance (ties by path),
    so the first reply to reach the destination travels the shortest route.
    ``transmissions`` counts every RREQ delivery, duplicates included.
    """
    _check_endpoints(layout, src, dst)
    seen = {src: {(src, request_id)}}
    origin = RouteRequest(src, dst, request_id, (src,), 0.0)
    queue = []
    transmissions = 0
    for m in layout.neighbors(src):
        arrival = layout.link_distance(src, m)
        heapq.heappush(queue, (arrival, (src, m), m, origin))
    replies = []
    while queue:
        _, _, node, rreq = heapq.heappop(queue)
        transmissions += 1
        action = process_rreq(node, rreq, layout, seen, exclude)
        if action.kind == "reply":
            replies.append(action.route)
        elif action.kind == "forward":
            for m, onward in action.forwards:
                arrival = onward.accumulated_distance + layout.link_distance(node, m)
                heapq.heappush(queue, (arrival, onward.path_so_far + (m,), m, onward))
    return FloodResult(replies[0] if replies else None, transmissions, replies)


@dataclass
class RoutingTable:
    """Ranked candidate routes per (origin, destination) plus the active one."""

    entries: dict = field(default_factory=dict)
    active: dict = field(default_factory=dict)

    def install(self, origin, destination, routes):
        routes = sorted(routes, key=Route.rank_key)
        self.entries[(origin, destination)] = routes
        self.active[(origin, destination)] = 0

    def candidates(self, origin, destination):
        return list(self.entries.get((origin, destination), ()))

    def activate(self, origin, destination, route):
        routes = self.entries.setdefault((origin, destination), [])
        if route not in routes:
            routes.append(route)
            routes.sort(key=Route.rank_key)
        self.active[(origin, destination)] = routes.index(route)

    def active_route(self, origin, destination):
        routes = self.entries.get((origin, destination))
        if not routes:
            return None
        return routes[self.active[(origin, destination)]]


def route_nodes_depleted(route, batteries, threshold):
    """Battery-powered nodes of ``route`` (intermediates and destination) below threshold."""
    return {
        n for n in route.path[1:] if n in batteries and is_depleted(batteries[n], threshold)
    }


def select_route(candidates, batteries, threshold):
    """First route in rank order with no depleted intermediate or destination."""
    candidates = list(candidates)
    if not candidates:
        raise ValidationError("select_route needs at least one candidate")
    for route in candidates:
        if not route_nodes_depleted(route, batteries, threshold):
            return route
    raise AllRoutesDepleted(
        "every candidate route has a depleted node: "
        + ", ".join(route.dashed() for route in candidates)
    )


def on_route_failure(layout, src, dst, depleted, k=2):
    """Rediscover with ``depleted`` nodes barred from forwarding; return the best route."""
    depleted = set(depleted)
    if dst in depleted:
        raise AllRoutesDepleted(f"destination {dst} is depleted")
    try:
        return discover_routes(layout, src, dst, k, exclude=depleted)[0]
    except NoRoute:
        raise AllRoutesDepleted(
            f"no route from {src} to {dst} avoids depleted nodes {sorted(depleted)}"
        ) from None


def end_to_end_delay(route, per_hop_time):
    """Links times per-hop transmission time, in seconds."""
    if per_hop_time <= 0:
        raise ValidationError(f"per_hop_time must be positive, got {per_hop_time}")
    return route.hop_count * per_hop_time
