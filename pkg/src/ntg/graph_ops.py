"""Whole-graph geometric transforms: chain simplification, edge subdivision, cropping."""

from __future__ import annotations

import math

from .geometry import dist, point_segment_distance
from .graph import GraphError, RoadGraph


def _rdp_keep(poly: list[tuple[float, float]], tol: float) -> list[int]:
    """Indices of points kept by Ramer-Douglas-Peucker at tolerance tol."""
    keep = {0, len(poly) - 1}
    stack = [(0, len(poly) - 1)]
    while stack:
        i, j = stack.pop()
        if j <= i + 1:
            continue
        dmax, imax = -1.0, -1
        for m in range(i + 1, j):
            d = point_segment_distance(poly[m], poly[i], poly[j])
            if d > dmax:
                dmax, imax = d, m
        if dmax > tol:
            keep.add(imax)
            stack.append((i, imax))
            stack.append((imax, j))
    return sorted(keep)


def _anchors(graph: RoadGraph) -> set[int]:
    anchors = set()
    for v in graph.nodes:
        if graph.degree(v) != 2:
            anchors.add(v)
        elif graph.edge_type is not None:
            a, b = graph.adj[v]
            if graph.get_edge_type(v, a) != graph.get_edge_type(v, b):
                anchors.add(v)
    return anchors


def _chains(graph: RoadGraph) -> list[list[int]]:
    """Maximal runs of degree-2 nodes between anchors, plus pure cycles."""
    anchors = _anchors(graph)
    visited: set[tuple[int, int]] = set()
    chains: list[list[int]] = []

    def mark(a: int, b: int) -> None:
        visited.add((a, b))
        visited.add((b, a))

    for start in sorted(anchors):
        for first in list(graph.adj[start]):
            if (start, first) in visited:
                continue
            chain = [start, first]
            mark(start, first)
            while chain[-1] not in anchors:
                prev, cur = chain[-2], chain[-1]
                nxt = [nb for nb in graph.adj[cur] if nb != prev]
                if not nxt:
                    break
                chain.append(nxt[0])
                mark(cur, nxt[0])
            chains.append(chain)

    # components that are pure cycles have no anchor; walk them from their min id
    for a, b in list(graph.edges()):
        if (a, b) in visited:
            continue
        start = min(a, b)
        chain = [start, graph.adj[start][0]]
        mark(chain[0], chain[1])
        while chain[-1] != start:
            prev, cur = chain[-2], chain[-1]
            nxt = [nb for nb in graph.adj[cur] if nb != prev][0]
            chain.append(nxt)
            mark(cur, nxt)
        chains.append(chain)
    return chains


def _simplify_chain(
    graph: RoadGraph, chain: list[int], tol: float
) -> list[int]:
    poly = [graph.nodes[v] for v in chain]
    if chain[0] != chain[-1]:
        return [chain[m] for m in _rdp_keep(poly, tol)]
    # closed loop: split at the point farthest from the anchor
    far = max(range(1, len(chain) - 1), key=lambda m: dist(poly[0], poly[m]))
    left = [chain[m] for m in _rdp_keep(poly[: far + 1], tol)]
    right = [chain[far + m] for m in _rdp_keep(poly[far:], tol)]
    merged = left + right[1:]
    if len(set(merged)) < 3:
        # keep the loop a valid polygon
        third = max(
            (m for m in range(1, len(chain) - 1) if m != far),
            key=lambda m: point_segment_distance(poly[m], poly[0], poly[far]),
            default=None,
        )
        if third is not None:
            merged = sorted({chain[0], chain[far], chain[third]}, key=chain.index)
            merged.append(chain[0])
    return merged


def rdp_simplify(graph: RoadGraph, tolerance: float) -> RoadGraph:
    """Drop degree-2 nodes along chains that deviate at most tolerance meters.

    Junctions, endpoints, and edge-type boundaries are always kept.
    """
    out = RoadGraph()
    if graph.edge_type is not None:
        out.edge_type = {}
    for chain in _chains(graph):
        kind = graph.get_edge_type(chain[0], chain[1])
        kept = _simplify_chain(graph, chain, tolerance)
        for v in kept:
            if v not in out.nodes:
                x, y = graph.nodes[v]
                out.add_node(x, y, v)
        for a, b in zip(kept, kept[1:]):
            out.add_edge(a, b, kind)
    for v in graph.nodes:  # isolated nodes survive untouched
        if graph.degree(v) == 0:
            x, y = graph.nodes[v]
            out.add_node(x, y, v)
    return out


def contract_short_edges(graph: RoadGraph, min_len: float) -> RoadGraph:
    """Merge endpoints of edges shorter than min_len (skeleton cleanup).

    The lower-degree endpoint folds into the higher-degree one, so junction
    pixel clusters collapse to a single node.
    """
    out = graph.copy()
    changed = True
    while changed:
        changed = False
        for a, b in sorted(out.edges()):
            if a not in out.nodes or b not in out.nodes:
                continue
            if out.edge_length(a, b) >= min_len:
                continue
            keep, drop = (a, b) if (out.degree(a), -a) >= (out.degree(b), -b) else (b, a)
            for nb in list(out.adj[drop]):
                kind = out.get_edge_type(drop, nb)
                out.remove_edge(drop, nb)
                if nb != keep and not out.has_edge(keep, nb):
                    out.add_edge(keep, nb, kind)
            out.remove_node(drop)
            changed = True
    return out


def subdivide(graph: RoadGraph, max_edge: float) -> RoadGraph:
    """Insert evenly spaced nodes so that no edge is longer than max_edge."""
    if max_edge <= 0:
        raise GraphError("max_edge must be positive")
    out = RoadGraph()
    if graph.edge_type is not None:
        out.edge_type = {}
    for v, (x, y) in graph.nodes.items():
        out.add_node(x, y, v)
    for a, b in graph.edges():
        kind = graph.get_edge_type(a, b)
        length = graph.edge_length(a, b)
        pieces = max(1, math.ceil(length / max_edge - 1e-9))
        (ax, ay), (bx, by) = graph.nodes[a], graph.nodes[b]
        prev = a
        for i in range(1, pieces):
            t = i / pieces
            mid = out.add_node(ax + t * (bx - ax), ay + t * (by - ay))
            out.add_edge(prev, mid, kind)
            prev = mid
        out.add_edge(prev, b, kind)
    return out


def _clip_segment(
    p: tuple[float, float],
    q: tuple[float, float],
    bbox: tuple[float, float, float, float],
) -> tuple[float, float] | None:
    """Liang-Barsky: parameter range [t0, t1] of p->q inside bbox, or None."""
    x0, y0, x1, y1 = bbox
    dx, dy = q[0] - p[0], q[1] - p[1]
    t0, t1 = 0.0, 1.0
    for num, den in (
        (x0 - p[0], dx),
        (p[0] - x1, -dx),
        (y0 - p[1], dy),
        (p[1] - y1, -dy),
    ):
        if den == 0.0:
            if num > 0.0:
                return None
            continue
        t = num / den
        if den > 0.0:
            t0 = max(t0, t)
        else:
            t1 = min(t1, t)
    if t0 > t1:
        return None
    return t0, t1


def crop(graph: RoadGraph, bbox: tuple[float, float, float, float]) -> RoadGraph:
    """Clip the graph to an axis-aligned box and keep the largest component.

    Edges crossing the boundary get a node inserted at the crossing point.
    """
    x0, y0, x1, y1 = bbox
    if x0 >= x1 or y0 >= y1:
        raise GraphError("degenerate bbox")

    def inside(p: tuple[float, float]) -> bool:
        return x0 <= p[0] <= x1 and y0 <= p[1] <= y1

    out = RoadGraph()
    if graph.edge_type is not None:
        out.edge_type = {}
    for v, p in graph.nodes.items():
        if inside(p):
            out.add_node(p[0], p[1], v)

    def boundary_node(p: tuple[float, float]) -> int:
        return out.add_or_merge_node(p[0], p[1])

    for a, b in graph.edges():
        pa, pb = graph.nodes[a], graph.nodes[b]
        clip = _clip_segment(pa, pb, bbox)
        if clip is None:
            continue
        t0, t1 = clip
        if t1 - t0 <= 1e-12 and not (inside(pa) or inside(pb)):
            continue
        kind = graph.get_edge_type(a, b)

        def lerp(t: float) -> tuple[float, float]:
            return (pa[0] + t * (pb[0] - pa[0]), pa[1] + t * (pb[1] - pa[1]))

        start = a if inside(pa) else boundary_node(lerp(t0))
        end = b if inside(pb) else boundary_node(lerp(t1))
        if start != end:
            out.add_edge(start, end, kind)

    result = out.largest_component()
    if not result.nodes:
        raise GraphError("crop produced an empty graph")
    return result
