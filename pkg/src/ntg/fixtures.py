"""Small synthetic graphs used by experiments, demos, and the test suite."""

from __future__ import annotations

import numpy as np

from .graph import RoadGraph


def grid_graph(nx: int = 12, ny: int = 12, spacing: float = 100.0) -> RoadGraph:
    """Axis-aligned nx-by-ny block grid, the stock toy city."""
    graph = RoadGraph()
    ids = {}
    for j in range(ny):
        for i in range(nx):
            ids[(i, j)] = graph.add_node(i * spacing, j * spacing)
    for j in range(ny):
        for i in range(nx):
            if i + 1 < nx:
                graph.add_edge(ids[(i, j)], ids[(i + 1, j)])
            if j + 1 < ny:
                graph.add_edge(ids[(i, j)], ids[(i, j + 1)])
    return graph


def random_geometric_graph(
    n_nodes: int,
    rng: np.random.Generator,
    extent: float = 1000.0,
    connect_radius: float = 320.0,
    min_separation: float = 40.0,
) -> RoadGraph:
    """Connected random planar-ish graph for property tests."""
    graph = RoadGraph()
    while len(graph.nodes) < n_nodes:
        x = float(rng.uniform(0, extent))
        y = float(rng.uniform(0, extent))
        if graph.nearest_node(x, y, min_separation) is None:
            graph.add_node(x, y)
    nodes = sorted(graph.nodes)
    for i, a in enumerate(nodes):
        for b in nodes[i + 1 :]:
            if graph.edge_length(a, b) <= connect_radius and rng.random() < 0.5:
                graph.add_edge(a, b)
    # stitch components together through their closest node pair
    comps = graph.components()
    while len(comps) > 1:
        base = comps[0]
        other = comps[1]
        best = min(
            ((a, b) for a in base for b in other),
            key=lambda ab: graph.edge_length(*ab),
        )
        graph.add_edge(*best)
        comps = graph.components()
    return graph
