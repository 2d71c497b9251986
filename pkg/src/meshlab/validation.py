"""Input validation helpers shared by the public entry points."""

import math
from collections.abc import Iterable

from meshlab.exceptions import ValidationError


def check_positive(value, name):
    value = float(value)
    if not math.isfinite(value) or value <= 0:
        raise ValidationError(f"{name} must be a positive finite number, got {value!r}")
    return value


def check_non_negative(value, name):
    value = float(value)
    if not math.isfinite(value) or value < 0:
        raise ValidationError(f"{name} must be non-negative, got {value!r}")
    return value


def check_node_id(value, name="node id"):
    integral = isinstance(value, int) or (isinstance(value, float) and value.is_integer())
    if isinstance(value, bool) or not integral:
        raise ValidationError(f"{name} must be an integer, got {value!r}")
    value = int(value)
    if value < 1:
        raise ValidationError(f"{name} must be >= 1, got {value}")
    return value


def check_constraints(constraints: Iterable) -> list[tuple[int, int, float]]:
    """Normalise ``(a, b, distance)`` triples and check the constraint graph.

    Raises ``ValidationError`` for self-loops, non-positive distances,
    contradictory duplicates, or a disconnected constraint graph.
    """
    out = []
    seen = {}
    for item in constraints:
        try:
            a, b, dist = item
        except (TypeError, ValueError):
            raise ValidationError(f"constraint must be (node_a, node_b, distance), got {item!r}")
        a, b = check_node_id(a, "constraint node"), check_node_id(b, "constraint node")
        dist = check_positive(dist, f"distance {a}-{b}")
        if a == b:
            raise ValidationError(f"constraint {a}-{b} joins a node to itself")
        key = (min(a, b), max(a, b))
        if key in seen:
            if abs(seen[key] - dist) > 1e-9:
                raise ValidationError(
                    f"contradictory constraints for {key[0]}-{key[1]}: {seen[key]} vs {dist}"
                )
            continue
        seen[key] = dist
        out.append((a, b, dist))
    if not out:
        raise ValidationError("at least one distance constraint is required")

    nodes = {n for a, b, _ in out for n in (a, b)}
    adjacency = {n: set() for n in nodes}
    for a, b, _ in out:
        adjacency[a].add(b)
        adjacency[b].add(a)
    start = min(nodes)
    stack, reached = [start], {start}
    while stack:
        for m in adjacency[stack.pop()]:
            if m not in reached:
                reached.add(m)
                stack.append(m)
    if reached != nodes:
        raise ValidationError(
            f"constraint graph is disconnected; unreachable from node {start}: "
            f"{sorted(nodes - reached)}"
        )
    return out
