"""Sketch-to-seed conversion and the stored junction templates.

User strokes are resampled, noded at crossings, merged at near-coincident
endpoints, simplified, and each junction is snapped to the best-matching
stored arm-angle template so a wobbly hand-drawn "+" becomes a clean
4-way root.
"""

from __future__ import annotations

import math
import warnings

from .geometry import angle_ccw, dist, segment_intersection_point, wrap_signed
from .graph import GraphError, RoadGraph
from .graph_ops import rdp_simplify, subdivide

Stroke = list[tuple[float, float]]

TAU = 2.0 * math.pi

# canonical arm angles per arity; several shapes compete where it matters
JUNCTION_TEMPLATES: dict[int, list[tuple[str, tuple[float, ...]]]] = {
    3: [
        ("tee", (0.0, math.pi / 2, math.pi)),
        ("wye", (0.0, TAU / 3, 2 * TAU / 3)),
    ],
    4: [("cross", (0.0, math.pi / 2, math.pi, 3 * math.pi / 2))],
    5: [("star5", tuple(i * TAU / 5 for i in range(5)))],
    6: [("star6", tuple(i * TAU / 6 for i in range(6)))],
}


def resample_stroke(stroke: Stroke, spacing: float) -> Stroke:
    """Points along the stroke at least `spacing` apart, endpoints kept."""
    pts = [tuple(map(float, p)) for p in stroke]
    out: Stroke = []
    for p in pts:
        if not out or dist(out[-1], p) >= spacing:
            out.append(p)
    if len(pts) >= 2 and out and out[-1] != pts[-1] and dist(out[-1], pts[-1]) > 1e-9:
        if dist(out[-1], pts[-1]) >= spacing / 2:
            out.append(pts[-1])
        else:
            out[-1] = pts[-1]
    return out


def _node_crossings(strokes: list[Stroke]) -> list[Stroke]:
    """Insert intersection points so crossings become shared polyline vertices."""
    segments: list[tuple[int, int]] = []  # (stroke, segment start index)
    for si, stroke in enumerate(strokes):
        for i in range(len(stroke) - 1):
            segments.append((si, i))

    cuts: dict[tuple[int, int], list[tuple[float, tuple[float, float]]]] = {}
    for i in range(len(segments)):
        si, ai = segments[i]
        a1, a2 = strokes[si][ai], strokes[si][ai + 1]
        for j in range(i + 1, len(segments)):
            sj, bi = segments[j]
            if si == sj and abs(ai - bi) <= 1:
                continue  # adjacent segments of one stroke share a vertex
            b1, b2 = strokes[sj][bi], strokes[sj][bi + 1]
            p = segment_intersection_point(a1, a2, b1, b2)
            if p is None:
                continue
            for (sk, idx), (q1, q2) in (((si, ai), (a1, a2)), ((sj, bi), (b1, b2))):
                seg_len = dist(q1, q2)
                t = dist(q1, p) / seg_len if seg_len > 0 else 0.0
                if 1e-9 < t < 1.0 - 1e-9:
                    cuts.setdefault((sk, idx), []).append((t, p))

    noded: list[Stroke] = []
    for si, stroke in enumerate(strokes):
        pts: Stroke = [stroke[0]]
        for i in range(len(stroke) - 1):
            for _t, p in sorted(cuts.get((si, i), [])):
                pts.append(p)
            pts.append(stroke[i + 1])
        noded.append(pts)
    return noded


def _merge_endpoint(graph: RoadGraph, src: int, dst: int) -> None:
    for nb in list(graph.adj[src]):
        kind = graph.get_edge_type(src, nb)
        graph.remove_edge(src, nb)
        if nb != dst and not graph.has_edge(dst, nb):
            graph.add_edge(dst, nb, kind)
    graph.remove_node(src)


def _fit_template(observed: list[float], arms: tuple[float, ...]) -> tuple[float, list[float]]:
    """Best rigid rotation of the template onto the observed arm angles.

    Returns (score, fitted angles aligned with the observed order).
    """
    n = len(observed)
    best: tuple[float, list[float]] | None = None
    for shift in range(n):
        diffs = [wrap_signed(observed[i] - arms[(i + shift) % n]) for i in range(n)]
        rot = math.atan2(
            sum(math.sin(d) for d in diffs), sum(math.cos(d) for d in diffs)
        )
        fitted = [(arms[(i + shift) % n] + rot) % TAU for i in range(n)]
        score = sum(wrap_signed(observed[i] - fitted[i]) ** 2 for i in range(n))
        if best is None or score < best[0]:
            best = (score, fitted)
    assert best is not None
    return best


def snap_junctions_to_templates(graph: RoadGraph) -> None:
    """Reposition free arm endpoints of each junction onto template angles."""
    for node_id in sorted(graph.nodes):
        degree = graph.degree(node_id)
        if degree < 3 or degree not in JUNCTION_TEMPLATES:
            continue
        center = graph.nodes[node_id]
        neighbors = sorted(
            graph.adj[node_id], key=lambda nb: angle_ccw(center, graph.nodes[nb])
        )
        observed = [angle_ccw(center, graph.nodes[nb]) for nb in neighbors]
        best_fit: tuple[float, list[float]] | None = None
        for _name, arms in JUNCTION_TEMPLATES[degree]:
            score, fitted = _fit_template(observed, arms)
            if best_fit is None or score < best_fit[0]:
                best_fit = (score, fitted)
        assert best_fit is not None
        for nb, target_angle in zip(neighbors, best_fit[1]):
            if graph.degree(nb) != 1:
                continue  # only free endpoints may move
            radius = dist(center, graph.nodes[nb])
            new_pos = (
                center[0] + radius * math.cos(target_angle),
                center[1] + radius * math.sin(target_angle),
            )
            graph.index.remove(nb, *graph.nodes[nb])
            graph.nodes[nb] = new_pos
            graph.index.add(nb, *new_pos)


def match_template(
    strokes: list[Stroke],
    resolution: float = 1.0,
    eps: float = 5.0,
    simplify_tol: float = 3.0,
    max_edge: float = 100.0,
) -> RoadGraph:
    """Build a generation seed graph from sketch strokes (meters)."""
    cleaned: list[Stroke] = []
    for stroke in strokes:
        pts = resample_stroke(stroke, resolution)
        if len(pts) < 2:
            warnings.warn("dropping stroke shorter than the model resolution")
            continue
        cleaned.append(pts)
    if not cleaned:
        raise GraphError("no usable strokes in sketch")

    noded = _node_crossings(cleaned)
    graph = RoadGraph()
    for stroke in noded:
        prev = None
        for p in stroke:
            cur = graph.add_or_merge_node(p[0], p[1])
            if prev is not None and prev != cur:
                graph.add_edge(prev, cur)
            prev = cur

    # merge dangling endpoints that nearly touch another node
    changed = True
    while changed:
        changed = False
        for node_id in sorted(graph.nodes):
            if node_id not in graph.nodes or graph.degree(node_id) != 1:
                continue
            x, y = graph.nodes[node_id]
            other = graph.nearest_node(x, y, eps, exclude=node_id)
            if other is not None and other not in graph.adj[node_id]:
                _merge_endpoint(graph, node_id, other)
                changed = True

    graph = rdp_simplify(graph, simplify_tol)
    graph = subdivide(graph, max_edge)
    snap_junctions_to_templates(graph)
    if not graph.nodes:
        raise GraphError("sketch produced an empty seed")
    return graph


def star_seed(
    arms: int = 4,
    arm_length: float = 100.0,
    center: tuple[float, float] = (0.0, 0.0),
    rotation: float = 0.0,
) -> RoadGraph:
    """A root node with `arms` spokes; the stock high-connectivity seed."""
    graph = RoadGraph()
    c = graph.add_node(center[0], center[1])
    for i in range(arms):
        ang = rotation + i * TAU / arms
        tip = graph.add_node(
            center[0] + arm_length * math.cos(ang),
            center[1] + arm_length * math.sin(ang),
        )
        graph.add_edge(c, tip)
    return graph
