"""Planar spatial road graph: nodes in metric coordinates, undirected edges.

The graph is single-writer; concurrent readers are fine, mutating while
iterating is not. A uniform 100 m grid index answers proximity queries.
"""

from __future__ import annotations

import math
from typing import Iterable, Iterator

from .geometry import angle_ccw, dist

MERGE_TOLERANCE = 0.5   # meters; near-coincident nodes are merged at ingestion
GRID_CELL = 100.0       # meters; matches the decoder's maximum offset

MAJOR = "major"
MINOR = "minor"
EDGE_TYPES = (MAJOR, MINOR)


class GraphError(ValueError):
    pass


class GridIndex:
    """Uniform-cell spatial hash over node positions."""

    def __init__(self, cell: float = GRID_CELL):
        self.cell = cell
        self._cells: dict[tuple[int, int], list[int]] = {}

    def _key(self, x: float, y: float) -> tuple[int, int]:
        return (math.floor(x / self.cell), math.floor(y / self.cell))

    def add(self, node_id: int, x: float, y: float) -> None:
        self._cells.setdefault(self._key(x, y), []).append(node_id)

    def remove(self, node_id: int, x: float, y: float) -> None:
        cell = self._cells.get(self._key(x, y))
        if cell is not None and node_id in cell:
            cell.remove(node_id)
            if not cell:
                del self._cells[self._key(x, y)]

    def candidates(self, x: float, y: float, radius: float) -> Iterator[int]:
        kx0, ky0 = self._key(x - radius, y - radius)
        kx1, ky1 = self._key(x + radius, y + radius)
        for kx in range(kx0, kx1 + 1):
            for ky in range(ky0, ky1 + 1):
                for node_id in self._cells.get((kx, ky), ()):
                    yield node_id


class RoadGraph:
    """Undirected planar graph of road control points.

    nodes: id -> (x, y) meters; adj: id -> ordered neighbor list;
    edge_type: optional (min_id, max_id) -> "major"|"minor" for every edge.
    """

    def __init__(self) -> None:
        self.nodes: dict[int, tuple[float, float]] = {}
        self.adj: dict[int, list[int]] = {}
        self.edge_type: dict[tuple[int, int], str] | None = None
        self.index = GridIndex()
        self._next_id = 0

    # -- construction ---------------------------------------------------

    def add_node(self, x: float, y: float, node_id: int | None = None) -> int:
        if node_id is None:
            node_id = self._next_id
        if node_id in self.nodes:
            raise GraphError(f"node id {node_id} already present")
        self.nodes[node_id] = (float(x), float(y))
        self.adj[node_id] = []
        self.index.add(node_id, x, y)
        self._next_id = max(self._next_id, node_id + 1)
        return node_id

    def add_or_merge_node(self, x: float, y: float, tol: float = MERGE_TOLERANCE) -> int:
        """Reuse any existing node within tol, else create a fresh one."""
        hit = self.nearest_node(x, y, tol)
        if hit is not None:
            return hit
        return self.add_node(x, y)

    def add_edge(self, a: int, b: int, kind: str | None = None) -> bool:
        """Insert edge a-b. Returns False when it already exists; self-loops raise."""
        if a == b:
            raise GraphError("self-loops are not allowed")
        if a not in self.nodes or b not in self.nodes:
            raise GraphError(f"edge ({a},{b}) references a missing node")
        if b in self.adj[a]:
            return False
        self.adj[a].append(b)
        self.adj[b].append(a)
        if kind is not None:
            if kind not in EDGE_TYPES:
                raise GraphError(f"unknown edge type {kind!r}")
            if self.edge_type is None:
                self.edge_type = {}
            self.edge_type[edge_key(a, b)] = kind
        elif self.edge_type is not None:
            # typed graphs must stay fully typed
            self.edge_type[edge_key(a, b)] = MINOR
        return True

    def remove_edge(self, a: int, b: int) -> None:
        self.adj[a].remove(b)
        self.adj[b].remove(a)
        if self.edge_type is not None:
            self.edge_type.pop(edge_key(a, b), None)

    def remove_node(self, node_id: int) -> None:
        for nb in list(self.adj[node_id]):
            self.remove_edge(node_id, nb)
        x, y = self.nodes[node_id]
        self.index.remove(node_id, x, y)
        del self.adj[node_id]
        del self.nodes[node_id]

    def copy(self) -> "RoadGraph":
        g = RoadGraph()
        for node_id, (x, y) in self.nodes.items():
            g.add_node(x, y, node_id)
        for a, b in self.edges():
            g.add_edge(a, b, self.get_edge_type(a, b))
        if self.edge_type is not None and g.edge_type is None:
            g.edge_type = {}
        return g

    # -- queries ---------------------------------------------------------

    def __len__(self) -> int:
        return len(self.nodes)

    def degree(self, node_id: int) -> int:
        return len(self.adj[node_id])

    def has_edge(self, a: int, b: int) -> bool:
        return b in self.adj.get(a, ())

    def get_edge_type(self, a: int, b: int) -> str | None:
        if self.edge_type is None:
            return None
        return self.edge_type.get(edge_key(a, b))

    def edges(self) -> Iterator[tuple[int, int]]:
        for a in self.nodes:
            for b in self.adj[a]:
                if a < b:
                    yield (a, b)

    def edge_count(self) -> int:
        return sum(len(nbs) for nbs in self.adj.values()) // 2

    def edge_length(self, a: int, b: int) -> float:
        return dist(self.nodes[a], self.nodes[b])

    def total_length(self) -> float:
        return sum(self.edge_length(a, b) for a, b in self.edges())

    def bbox(self) -> tuple[float, float, float, float]:
        if not self.nodes:
            raise GraphError("empty graph has no bbox")
        xs = [p[0] for p in self.nodes.values()]
        ys = [p[1] for p in self.nodes.values()]
        return (min(xs), min(ys), max(xs), max(ys))

    def nearest_node(
        self, x: float, y: float, max_dist: float, exclude: int | None = None
    ) -> int | None:
        """Nearest node within max_dist (inclusive), ties broken by smaller id."""
        best = None
        best_d = max_dist
        for node_id in self.index.candidates(x, y, max_dist):
            if node_id == exclude:
                continue
            d = dist((x, y), self.nodes[node_id])
            if d < best_d or (d == best_d and (best is None or node_id < best)):
                best = node_id
                best_d = d
        return best

    def nodes_within(self, x: float, y: float, radius: float) -> list[int]:
        out = []
        for node_id in self.index.candidates(x, y, radius):
            if dist((x, y), self.nodes[node_id]) <= radius:
                out.append(node_id)
        return out

    def components(self) -> list[list[int]]:
        """Connected components, each listed in ascending id order."""
        seen: set[int] = set()
        comps: list[list[int]] = []
        for start in sorted(self.nodes):
            if start in seen:
                continue
            stack = [start]
            comp = []
            seen.add(start)
            while stack:
                v = stack.pop()
                comp.append(v)
                for nb in self.adj[v]:
                    if nb not in seen:
                        seen.add(nb)
                        stack.append(nb)
            comps.append(sorted(comp))
        return comps

    def largest_component(self) -> "RoadGraph":
        comps = self.components()
        if not comps:
            return RoadGraph()
        keep = set(max(comps, key=len))
        return self.subgraph(keep)

    def subgraph(self, keep: Iterable[int]) -> "RoadGraph":
        keep = set(keep)
        g = RoadGraph()
        for node_id in sorted(keep):
            x, y = self.nodes[node_id]
            g.add_node(x, y, node_id)
        for a, b in self.edges():
            if a in keep and b in keep:
                g.add_edge(a, b, self.get_edge_type(a, b))
        if self.edge_type is not None and g.edge_type is None:
            g.edge_type = {}
        return g


def edge_key(a: int, b: int) -> tuple[int, int]:
    return (a, b) if a < b else (b, a)


def snap(graph: RoadGraph, point: tuple[float, float], eps: float) -> int | None:
    """Nearest existing node within eps (inclusive) of point, else None."""
    return graph.nearest_node(point[0], point[1], eps)


def local_stats(
    graph: RoadGraph, node_id: int, radii: tuple[float, ...] = (100.0, 200.0, 300.0)
) -> tuple[int, tuple[int, ...], float]:
    """(degree, node counts within each radius including self, min incident angle).

    The incident angle is the smallest gap between consecutive incident edges
    in counter-clockwise order; nodes of degree <= 1 report 2*pi.
    """
    x, y = graph.nodes[node_id]
    density = tuple(len(graph.nodes_within(x, y, r)) for r in radii)
    deg = graph.degree(node_id)
    if deg <= 1:
        return deg, density, 2.0 * math.pi
    angles = sorted(
        angle_ccw(graph.nodes[node_id], graph.nodes[nb]) for nb in graph.adj[node_id]
    )
    gaps = [angles[i + 1] - angles[i] for i in range(len(angles) - 1)]
    gaps.append(2.0 * math.pi - (angles[-1] - angles[0]))
    return deg, density, min(gaps)


def validate(graph: RoadGraph, merge_tol: float = MERGE_TOLERANCE) -> None:
    """Raise GraphError on any violated structural invariant."""
    for a, nbs in graph.adj.items():
        if len(set(nbs)) != len(nbs):
            raise GraphError(f"duplicate edges at node {a}")
        for b in nbs:
            if b == a:
                raise GraphError(f"self-loop at node {a}")
            if a not in graph.adj.get(b, ()):
                raise GraphError(f"asymmetric edge ({a},{b})")
    for node_id, (x, y) in graph.nodes.items():
        near = graph.nearest_node(x, y, merge_tol, exclude=node_id)
        if near is not None and dist((x, y), graph.nodes[near]) < merge_tol:
            raise GraphError(f"nodes {node_id} and {near} closer than {merge_tol} m")
    if graph.edge_type is not None:
        edges = set(graph.edges())
        typed = set(graph.edge_type)
        if typed != edges:
            raise GraphError("edge_type does not cover exactly the edge set")
        for kind in graph.edge_type.values():
            if kind not in EDGE_TYPES:
                raise GraphError(f"unknown edge type {kind!r}")
