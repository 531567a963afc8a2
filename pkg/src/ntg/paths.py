"""Acyclic incoming-path machinery: motion sequences and random-walk sampling.

An incoming path is an ordered sequence of unique, pairwise-adjacent node ids
terminating at the node being expanded. Motion steps between consecutive
nodes feed the sequence encoder, either as cartesian offsets or as
rotation-invariant polar steps.
"""

from __future__ import annotations

import math

import numpy as np

from .geometry import angle_ccw, dist, heading, wrap_signed
from .graph import GraphError, RoadGraph


def validate_path(graph: RoadGraph, node_ids: list[int]) -> None:
    if len(node_ids) != len(set(node_ids)):
        raise GraphError("path revisits a node")
    for a, b in zip(node_ids, node_ids[1:]):
        if not graph.has_edge(a, b):
            raise GraphError(f"path step ({a},{b}) is not an edge")


def motion_sequence(
    node_ids: list[int], coords: dict[int, tuple[float, float]]
) -> list[tuple[float, float]]:
    """Cartesian offsets between consecutive path nodes; empty for a single node."""
    out = []
    for a, b in zip(node_ids, node_ids[1:]):
        (ax, ay), (bx, by) = coords[a], coords[b]
        out.append((bx - ax, by - ay))
    return out


def polar_motion_sequence(
    node_ids: list[int], coords: dict[int, tuple[float, float]]
) -> list[tuple[float, float]]:
    """(length, turn angle) per step; the first step's turn is 0 by convention.

    Turn angles are signed, in (-pi, pi], relative to the previous segment's
    heading, which makes the sequence invariant to rigid motions of the path.
    """
    if len(node_ids) < 2:
        raise GraphError("polar motion needs at least 2 nodes")
    out = []
    prev_heading = None
    for a, b in zip(node_ids, node_ids[1:]):
        pa, pb = coords[a], coords[b]
        r = dist(pa, pb)
        if r <= 0.0:
            raise GraphError(f"zero-length segment ({a},{b})")
        h = heading(pa, pb)
        theta = 0.0 if prev_heading is None else wrap_signed(h - prev_heading)
        out.append((r, theta))
        prev_heading = h
    return out


def sample_incoming_paths(
    graph: RoadGraph,
    node_id: int,
    k: int,
    max_len: int,
    rng: np.random.Generator,
) -> list[list[int]]:
    """Up to k distinct acyclic paths terminating at node_id.

    Each path comes from a uniform random walk out of node_id that never
    revisits a node and takes at most max_len steps; the walk is then
    reversed so it terminates at node_id. Duplicates are dropped, so fewer
    than k paths may come back.
    """
    if not graph.adj[node_id]:
        raise GraphError(f"node {node_id} has no incoming paths")
    seen: set[tuple[int, ...]] = set()
    paths: list[list[int]] = []
    for _ in range(k):
        walk = [node_id]
        visited = {node_id}
        for _ in range(max_len):
            options = [nb for nb in graph.adj[walk[-1]] if nb not in visited]
            if not options:
                break
            nxt = options[int(rng.integers(len(options)))]
            walk.append(nxt)
            visited.add(nxt)
        path = walk[::-1]
        key = tuple(path)
        if key not in seen:
            seen.add(key)
            paths.append(path)
    return paths


def enumerate_incoming_paths(
    graph: RoadGraph, node_id: int, max_len: int
) -> set[tuple[int, ...]]:
    """Every acyclic path of 1..max_len steps terminating at node_id (test oracle)."""
    found: set[tuple[int, ...]] = set()

    def extend(walk: list[int], visited: set[int]) -> None:
        if len(walk) > 1:
            found.add(tuple(walk[::-1]))
        if len(walk) - 1 >= max_len:
            return
        for nb in graph.adj[walk[-1]]:
            if nb not in visited:
                extend(walk + [nb], visited | {nb})

    extend([node_id], {node_id})
    return found


def ccw_sort(
    center: tuple[float, float],
    targets: list[int],
    coords: dict[int, tuple[float, float]],
) -> list[int]:
    """Targets ordered by ascending angle about center in [0, 2*pi).

    Angle ties are broken by ascending distance, then by id, so the ordering
    is a stable training target.
    """

    def key(node_id: int):
        p = coords[node_id]
        return (angle_ccw(center, p), dist(center, p), node_id)

    return sorted(targets, key=key)


def path_arc_length(
    node_ids: list[int], coords: dict[int, tuple[float, float]]
) -> float:
    return sum(
        math.hypot(coords[b][0] - coords[a][0], coords[b][1] - coords[a][1])
        for a, b in zip(node_ids, node_ids[1:])
    )


def polar_to_cartesian(
    steps: list[tuple[float, float]], initial_heading: float = 0.0
) -> list[tuple[float, float]]:
    """Invert polar steps back to cartesian offsets.

    The first step's turn is 0 by convention, so its absolute direction is
    whatever `initial_heading` says; feeding the original first-segment
    heading reproduces the cartesian motion sequence to float precision.
    """
    out = []
    head = initial_heading
    for i, (r, theta) in enumerate(steps):
        if i > 0:
            head += theta
        out.append((r * math.cos(head), r * math.sin(head)))
    return out
