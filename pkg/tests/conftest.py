import math

import networkx as nx
import pytest

from meshlab import Route, paper_scenario
from meshlab.topology import Role


def oracle_routes(layout, src, dst, k):
    """Brute-force ranking: every simple path on the relay-induced graph, sorted."""
    keep = {n.id for n in layout.nodes if n.role is Role.ROUTER} | {src, dst}
    graph = nx.Graph()
    graph.add_nodes_from(keep)
    for a in keep:
        for b in layout.neighbors(a):
            if b in keep:
                graph.add_edge(a, b)
    routes = []
    for path in nx.all_simple_paths(graph, src, dst):
        links = tuple(math.dist(layout.position(a), layout.position(b)) for a, b in zip(path, path[1:]))
        routes.append(Route(tuple(path), links))
    routes.sort(key=Route.rank_key)
    return routes[:k]


@pytest.fixture(scope="session")
def center():
    return paper_scenario("center-v2")


@pytest.fixture(scope="session")
def corner():
    return paper_scenario("corner-v2")


@pytest.fixture(scope="session")
def center_report(center):
    return center.run()
