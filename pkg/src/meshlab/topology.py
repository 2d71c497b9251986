"""Node placement, radio-range neighbour discovery and layout fitting."""

import csv
import io
import json
import math
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

import numpy as np
from scipy.optimize import least_squares
from sklearn.base import BaseEstimator
from sklearn.utils import check_random_state

from meshlab.exceptions import NoFeasibleLayout, ParseError, ValidationError
from meshlab.formatting import meters, volts
from meshlab.validation import check_constraints, check_node_id, check_positive

DEFAULT_AREA_SIDE = 600.0
DEFAULT_RADIO_RANGE = 185.0
CENTER_ANCHOR = (300.0, 300.0)
CORNER_ANCHOR = (0.0, 600.0)  # top-left with y pointing up

# 1 coordinator, 6 routers, 8 end devices
CANONICAL_CENSUS = {"coordinator": 1, "router": 6, "end_device": 8}


class Role(str, Enum):
    COORDINATOR = "coordinator"
    ROUTER = "router"
    END_DEVICE = "end_device"


@dataclass(frozen=True)
class Node:
    id: int
    role: Role
    x: float
    y: float

    @property
    def position(self):
        return (self.x, self.y)


def distance(a, b):
    """Euclidean distance between two ``(x, y)`` positions, in metres."""
    return math.hypot(a[0] - b[0], a[1] - b[1])


@dataclass(frozen=True)
class NetworkLayout:
    """Immutable placement of nodes on a square field."""

    nodes: tuple
    area_side: float = DEFAULT_AREA_SIDE
    radio_range: float = DEFAULT_RADIO_RANGE
    _index: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        nodes = tuple(sorted(self.nodes, key=lambda n: n.id))
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "area_side", check_positive(self.area_side, "area_side"))
        object.__setattr__(self, "radio_range", check_positive(self.radio_range, "radio_range"))
        ids = [n.id for n in nodes]
        if len(set(ids)) != len(ids):
            raise ValidationError(f"node ids must be unique, got {ids}")
        if ids and ids != list(range(1, len(ids) + 1)):
            raise ValidationError(f"node ids must be 1..{len(ids)}, got {ids}")
        coordinators = [n.id for n in nodes if n.role is Role.COORDINATOR]
        if len(coordinators) != 1:
            raise ValidationError(
                f"layout needs exactly one coordinator, found {len(coordinators)}"
            )
        for n in nodes:
            if not (0 <= n.x <= self.area_side and 0 <= n.y <= self.area_side):
                raise ValidationError(
                    f"node {n.id} at ({n.x}, {n.y}) lies outside the "
                    f"{self.area_side:g} m field"
                )
        object.__setattr__(self, "_index", {n.id: n for n in nodes})

    def __len__(self):
        return len(self.nodes)

    def __contains__(self, node_id):
        return node_id in self._index

    @property
    def ids(self):
        return [n.id for n in self.nodes]

    @property
    def coordinator(self):
        return next(n.id for n in self.nodes if n.role is Role.COORDINATOR)

    def node(self, node_id) -> Node:
        try:
            return self._index[node_id]
        except KeyError:
            raise ValidationError(f"node {node_id} is not in the layout") from None

    def role(self, node_id) -> Role:
        return self.node(node_id).role

    def position(self, node_id):
        return self.node(node_id).position

    def link_distance(self, a, b):
        return distance(self.position(a), self.position(b))

    def in_range(self, a, b):
        return a != b and self.link_distance(a, b) <= self.radio_range

    def neighbors(self, node_id):
        """In-range neighbour ids of ``node_id``, ascending."""
        return [m for m in self.ids if self.in_range(node_id, m)]

    def census(self):
        counts = {r.value: 0 for r in Role}
        for n in self.nodes:
            counts[n.role.value] += 1
        return counts

    def check_census(self, expected=CANONICAL_CENSUS):
        if self.census() != dict(expected):
            raise ValidationError(f"role census {self.census()} does not match {dict(expected)}")

    def with_radio_range(self, radio_range):
        return NetworkLayout(self.nodes, self.area_side, radio_range)

    def to_dict(self):
        return {
            "area_side": self.area_side,
            "radio_range": self.radio_range,
            "nodes": [
                {"id": n.id, "role": n.role.value, "x": n.x, "y": n.y} for n in self.nodes
            ],
        }

    @classmethod
    def from_dict(cls, data):
        try:
            nodes = [
                Node(check_node_id(d["id"]), Role(d["role"]), float(d["x"]), float(d["y"]))
                for d in data["nodes"]
            ]
            return cls(
                tuple(nodes),
                float(data.get("area_side", DEFAULT_AREA_SIDE)),
                float(data.get("radio_range", DEFAULT_RADIO_RANGE)),
            )
        except (KeyError, TypeError) as exc:
            raise ParseError(f"malformed layout: {exc!r}") from exc
        except ValueError as exc:
            if isinstance(exc, ValidationError):
                raise
            raise ParseError(f"malformed layout: {exc}") from exc

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2) + "\n"

    def save(self, path):
        Path(path).write_text(self.to_json(), encoding="utf-8", newline="\n")

    @classmethod
    def load(cls, path):
        try:
            data = json.loads(Path(path).read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise ParseError(f"{path}: {exc}") from exc
        return cls.from_dict(data)


@dataclass(frozen=True)
class NeighborRow:
    node: int
    neighbor: int
    distance: float
    energy: float


@dataclass(frozen=True)
class NeighborTable:
    rows: tuple = ()

    def __len__(self):
        return len(self.rows)

    def __iter__(self):
        return iter(self.rows)

    def neighbors_of(self, node_id):
        return [r.neighbor for r in self.rows if r.node == node_id]

    def row(self, node, neighbor):
        for r in self.rows:
            if r.node == node and r.neighbor == neighbor:
                return r
        raise KeyError((node, neighbor))

    def to_csv(self):
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["node", "neighbor", "distance_m", "energy_v"])
        for r in self.rows:
            writer.writerow([r.node, r.neighbor, meters(r.distance), volts(r.energy)])
        return buf.getvalue()


def build_neighbor_table(layout: NetworkLayout, voltages=None) -> NeighborTable:
    """One row per ordered in-range pair, sorted by (node, neighbor).

    ``voltages`` maps node id to volts; missing entries (or ``voltages=None``)
    leave the energy column as NaN.
    """
    voltages = voltages or {}
    rows = []
    for a in layout.ids:
        for b in layout.neighbors(a):
            rows.append(
                NeighborRow(a, b, layout.link_distance(a, b), float(voltages.get(a, math.nan)))
            )
    return NeighborTable(tuple(rows))


def default_roles(node_ids):
    """Node 1 coordinates; the 15-node census gives 2-7 routers and the rest end devices."""
    node_ids = sorted(node_ids)
    if len(node_ids) == sum(CANONICAL_CENSUS.values()):
        return {
            n: Role.COORDINATOR if n == 1 else Role.ROUTER if n <= 7 else Role.END_DEVICE
            for n in node_ids
        }
    return {n: Role.COORDINATOR if n == 1 else Role.ROUTER for n in node_ids}


class LayoutFitter(BaseEstimator):
    """Recover 2-D coordinates from pairwise distance constraints.

    Multi-start stress minimisation with node 1 pinned at ``anchor``. The
    first start is classical MDS on graph shortest-path distances; later
    starts are uniform random draws. Each start is solved free of the field
    boundary, then rotated/reflected about the anchor into the field (this
    preserves every distance) and polished with a hinge penalty that keeps
    nodes inside.

    Parameters
    ----------
    anchor : (float, float)
        Fixed position of node 1.
    area_side : float
        Side of the square field in metres.
    n_init : int
        Maximum number of starts.
    max_iter : int
        Function-evaluation budget per least-squares solve.
    tol : float
        Largest acceptable absolute distance residual, in metres.
    random_state : int, RandomState or None

    Attributes
    ----------
    positions_ : dict[int, tuple[float, float]]
    residual_ : float
        Largest absolute constraint residual of the returned solution.
    n_iter_ : int
        Number of starts actually used.
    """

    def __init__(
        self,
        anchor=CENTER_ANCHOR,
        area_side=DEFAULT_AREA_SIDE,
        n_init=32,
        max_iter=5000,
        tol=1e-3,
        random_state=None,
    ):
        self.anchor = anchor
        self.area_side = area_side
        self.n_init = n_init
        self.max_iter = max_iter
        self.tol = tol
        self.random_state = random_state

    def fit(self, X, y=None):
        constraints = check_constraints(X)
        side = check_positive(self.area_side, "area_side")
        anchor = np.asarray(self.anchor, dtype=float)
        if anchor.shape != (2,) or not np.all((anchor >= 0) & (anchor <= side)):
            raise ValidationError(f"anchor {self.anchor!r} must be a point inside the field")
        ids = sorted({n for a, b, _ in constraints for n in (a, b)})
        if 1 not in ids:
            raise ValidationError("constraints must involve node 1, the pinned anchor")
        row = {n: i for i, n in enumerate(ids)}
        ia = np.array([row[a] for a, _, _ in constraints])
        ib = np.array([row[b] for _, b, _ in constraints])
        target = np.array([d for _, _, d in constraints])
        n = len(ids)
        rng = check_random_state(self.random_state)

        def unpack(v):
            pts = np.empty((n, 2))
            pts[0] = anchor  # node 1 sorts first
            pts[1:] = v.reshape(-1, 2)
            return pts

        def stress(v):
            pts = unpack(v)
            diff = pts[ia] - pts[ib]
            return np.hypot(diff[:, 0], diff[:, 1]) - target

        def penalised(v):
            # hinge: zero inside the field, linear outside
            box = np.concatenate([np.minimum(v, 0.0), np.maximum(v - side, 0.0)])
            return np.concatenate([stress(v), 10.0 * box])

        def solve(fun, v0):
            return least_squares(
                fun, v0, method="trf", xtol=1e-15, ftol=1e-15, gtol=1e-15,
                max_nfev=int(self.max_iter),
            ).x

        best_v, best_res = None, math.inf
        used = 0
        for start in range(max(1, int(self.n_init))):
            used += 1
            if start == 0:
                pts0 = _mds_start(n, ia, ib, target)
                pts0 += anchor - pts0[0]
                v0 = pts0[1:].ravel()
            else:
                v0 = rng.uniform(0.0, side, size=2 * (n - 1))
            v = solve(stress, v0)
            if np.max(np.abs(stress(v))) > self.tol:
                continue
            v = _orient_into_field(unpack(v), side)[1:].ravel()
            v = solve(penalised, v)
            inside = np.all((v >= -1e-9) & (v <= side + 1e-9))
            err = float(np.max(np.abs(stress(v))))
            if inside and err < best_res:
                best_v, best_res = np.clip(v, 0.0, side), err
            if best_res <= self.tol:
                break
        if best_v is None or best_res > self.tol:
            raise NoFeasibleLayout(
                f"no start reached residual <= {self.tol:g} m inside the field "
                f"after {used} starts"
            )
        pts = unpack(best_v)
        self.positions_ = {m: (float(pts[row[m], 0]), float(pts[row[m], 1])) for m in ids}
        self.residual_ = best_res
        self.n_iter_ = used
        return self

    def transform(self, X=None):
        """Positions as an ``(n_nodes, 2)`` array ordered by node id."""
        return np.array([self.positions_[n] for n in sorted(self.positions_)])

    def fit_transform(self, X, y=None):
        return self.fit(X).transform()


def _mds_start(n, ia, ib, target):
    """Classical MDS on shortest-path distances through the constraint graph."""
    from scipy.sparse import coo_matrix
    from scipy.sparse.csgraph import shortest_path

    graph = coo_matrix((target, (ia, ib)), shape=(n, n)).tocsr()
    D = shortest_path(graph, directed=False)
    H = np.eye(n) - 1.0 / n
    B = -0.5 * H @ (D**2) @ H
    evals, evecs = np.linalg.eigh(B)
    top = np.argsort(evals)[::-1][:2]
    return evecs[:, top] * np.sqrt(np.maximum(evals[top], 0.0))


def _orient_into_field(pts, side, steps=1440):
    """Rotate/reflect ``pts`` about ``pts[0]`` to maximise the worst margin to the field edge."""
    rel = pts - pts[0]
    angles = np.linspace(0.0, 2 * np.pi, steps, endpoint=False)
    best, best_margin = pts, -math.inf
    for flip in (1.0, -1.0):
        r = rel * np.array([1.0, flip])
        for t in angles:
            c, s = math.cos(t), math.sin(t)
            cand = pts[0] + r @ np.array([[c, s], [-s, c]])
            margin = min(cand.min(), side - cand.max())
            if margin > best_margin:
                best, best_margin = cand, margin
    return best


def fit_layout(
    constraints,
    area_side=DEFAULT_AREA_SIDE,
    seed=42,
    anchor=CENTER_ANCHOR,
    roles=None,
    radio_range=DEFAULT_RADIO_RANGE,
    tol=1e-3,
) -> NetworkLayout:
    """Fit a :class:`NetworkLayout` whose pairwise distances match ``constraints``.

    Raises ``NoFeasibleLayout`` when no start brings every residual under ``tol``.
    """
    fitter = LayoutFitter(anchor=anchor, area_side=area_side, tol=tol, random_state=seed)
    fitter.fit(constraints)
    roles = roles or default_roles(fitter.positions_)
    nodes = tuple(
        Node(n, Role(roles[n]), x, y) for n, (x, y) in sorted(fitter.positions_.items())
    )
    return NetworkLayout(nodes, area_side, radio_range)


def read_constraints_csv(path):
    """Read ``node_a,node_b,distance_m`` rows; extra columns are ignored."""
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            reader = csv.DictReader(fh)
            return [
                (int(row["node_a"]), int(row["node_b"]), float(row["distance_m"]))
                for row in reader
            ]
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"{path}: expected columns node_a,node_b,distance_m ({exc})") from exc
