"""Evaluation metrics for road graphs.

Covers the urban-planning feature vector (density / connectivity / reach /
convenience) with a Frechet distance between feature Gaussians, the
symmetric corridor-based diversity percentage, routing-aware APLS with
on-road snapping, and pixel IOU / F1 on rasterized graphs. Everything is a
pure function of its inputs plus an explicit seed where sampling happens.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass

import numpy as np

from .geometry import dist, point_segment_distance, project_on_segment
from .graph import GraphError, RoadGraph, local_stats
from .graph_ops import rdp_simplify, subdivide
from .generate import Limits
from .spatial import SegmentIndex, graph_segment_index

REACH_RADII = (100.0, 200.0, 300.0)
CONVENIENCE_MIN_DIST = 500.0


def dijkstra(
    graph: RoadGraph, source: int, cutoff: float | None = None
) -> dict[int, float]:
    dists = {source: 0.0}
    heap = [(0.0, source)]
    while heap:
        d, v = heapq.heappop(heap)
        if d > dists.get(v, math.inf):
            continue
        if cutoff is not None and d > cutoff:
            continue
        for nb in graph.adj[v]:
            nd = d + graph.edge_length(v, nb)
            if cutoff is not None and nd > cutoff + 1e-9:
                continue
            if nd < dists.get(nb, math.inf):
                dists[nb] = nd
                heapq.heappush(heap, (nd, nb))
    return dists


# -- urban planning features -------------------------------------------------


@dataclass
class UrbanFeatures:
    density: tuple[int, int, int]
    degree: int
    reach: tuple[float, float, float]
    convenience: float | None

    def as_vector(self) -> np.ndarray:
        if self.convenience is None:
            raise ValueError("convenience is absent for this node")
        return np.array(
            [*self.density, self.degree, *self.reach, self.convenience], dtype=float
        )


def _reach(graph: RoadGraph, dists: dict[int, float], radius: float) -> float:
    """Road length within network distance `radius`, partial edges truncated."""
    total = 0.0
    for a, b in graph.edges():
        da = dists.get(a, math.inf)
        db = dists.get(b, math.inf)
        if da > radius and db > radius:
            continue
        length = graph.edge_length(a, b)
        from_a = min(length, max(0.0, radius - da))
        from_b = min(length, max(0.0, radius - db))
        total += min(length, from_a + from_b)
    return total


def urban_features(
    graph: RoadGraph,
    node_id: int,
    rng: np.random.Generator,
    convenience_partners: int = 32,
    min_pair_dist: float = CONVENIENCE_MIN_DIST,
) -> UrbanFeatures:
    x, y = graph.nodes[node_id]
    density = tuple(len(graph.nodes_within(x, y, r)) for r in REACH_RADII)
    degree = graph.degree(node_id)
    dists = dijkstra(graph, node_id)
    reach = tuple(_reach(graph, dists, r) for r in REACH_RADII)

    candidates = [
        v
        for v in sorted(graph.nodes)
        if v != node_id and dist((x, y), graph.nodes[v]) > min_pair_dist
    ]
    convenience = None
    if candidates:
        if len(candidates) > convenience_partners:
            picks = rng.choice(len(candidates), convenience_partners, replace=False)
            candidates = [candidates[i] for i in sorted(picks)]
        ratios = []
        for v in candidates:
            network = dists.get(v, math.inf)
            if math.isfinite(network) and network > 0:
                ratios.append(dist((x, y), graph.nodes[v]) / network)
        if ratios:
            convenience = float(np.mean(ratios))
    return UrbanFeatures(density, degree, reach, convenience)


@dataclass
class FeatureStats:
    mu: np.ndarray
    sigma: np.ndarray

    def __post_init__(self):
        self.mu = np.asarray(self.mu, dtype=float)
        self.sigma = np.asarray(self.sigma, dtype=float)
        if self.sigma.shape != (len(self.mu), len(self.mu)):
            raise ValueError("covariance shape does not match mean")


def feature_stats(
    graph: RoadGraph,
    rng: np.random.Generator,
    convenience_partners: int = 32,
    min_pair_dist: float = CONVENIENCE_MIN_DIST,
) -> FeatureStats:
    """Gaussian summary of per-node urban features across the whole graph.

    Nodes without an admissible convenience pair are left out of the stats.
    """
    rows = []
    for node_id in sorted(graph.nodes):
        feats = urban_features(
            graph, node_id, rng,
            convenience_partners=convenience_partners,
            min_pair_dist=min_pair_dist,
        )
        if feats.convenience is not None:
            rows.append(feats.as_vector())
    if not rows:
        raise GraphError("no node produced a full feature vector")
    data = np.stack(rows)
    mu = data.mean(axis=0)
    if len(rows) < 2:
        sigma = np.zeros((data.shape[1], data.shape[1]))
    else:
        sigma = np.cov(data, rowvar=False)
    return FeatureStats(mu, sigma)


def _psd_sqrt(matrix: np.ndarray) -> np.ndarray:
    vals, vecs = np.linalg.eigh(matrix)
    vals = np.clip(vals, 0.0, None)
    return (vecs * np.sqrt(vals)) @ vecs.T


def frechet_distance(a: FeatureStats, b: FeatureStats, sym_tol: float = 1e-6) -> float:
    """||mu_a - mu_b||^2 + tr(Sa + Sb - 2 (Sa^1/2 Sb Sa^1/2)^1/2).

    Matrix square roots use symmetric eigendecompositions with eigenvalues
    clamped at zero, so rank-deficient feature sets stay well-defined.
    """
    for stats in (a, b):
        if not np.allclose(stats.sigma, stats.sigma.T, atol=sym_tol):
            raise ValueError("covariance matrix is not symmetric")
    sa = 0.5 * (a.sigma + a.sigma.T)
    sb = 0.5 * (b.sigma + b.sigma.T)
    root_a = _psd_sqrt(sa)
    inner = root_a @ sb @ root_a
    cross = _psd_sqrt(0.5 * (inner + inner.T))
    diff = a.mu - b.mu
    value = float(diff @ diff + np.trace(sa) + np.trace(sb) - 2.0 * np.trace(cross))
    return max(0.0, value)


# -- diversity ----------------------------------------------------------------


def _edge_points(
    graph: RoadGraph, step: float
) -> tuple[np.ndarray, np.ndarray]:
    """Midpoint samples along every edge plus per-point length weights."""
    pts, weights = [], []
    for a, b in graph.edges():
        pa, pb = graph.nodes[a], graph.nodes[b]
        length = dist(pa, pb)
        n = max(1, math.ceil(length / step))
        for i in range(n):
            t = (i + 0.5) / n
            pts.append((pa[0] + t * (pb[0] - pa[0]), pa[1] + t * (pb[1] - pa[1])))
            weights.append(length / n)
    return np.array(pts), np.array(weights)


def _directed_outside(
    graph_from: RoadGraph,
    index_to: SegmentIndex,
    corridor: float,
    step: float,
) -> float:
    pts, weights = _edge_points(graph_from, step)
    if len(pts) == 0:
        raise GraphError("graph has no edges to sample")
    outside = 0.0
    for (x, y), w in zip(pts, weights):
        near = index_to.near_point((x, y), corridor)
        hit = False
        for key in near:
            qa, qb = index_to.segment(key)
            if point_segment_distance((x, y), qa, qb) <= corridor:
                hit = True
                break
        if not hit:
            outside += w
    return outside / weights.sum()


def diversity(
    g1: RoadGraph, g2: RoadGraph, corridor: float = 10.0, step: float = 1.0
) -> float:
    """Mean percentage of each graph's road length outside the other's corridor."""
    idx1 = graph_segment_index(g1)
    idx2 = graph_segment_index(g2)
    d12 = _directed_outside(g1, idx2, corridor, step)
    d21 = _directed_outside(g2, idx1, corridor, step)
    return 100.0 * 0.5 * (d12 + d21)


# -- APLS ----------------------------------------------------------------------


def _snap_points(
    source: RoadGraph, target: RoadGraph, index: SegmentIndex, buffer: float
):
    """For each source node: nearest on-road point of target within buffer.

    Returns node -> ("node", id) | ("edge", key, t, point) | None. Existing
    target nodes win ties against edge-interior projections.
    """
    snaps = {}
    for v in source.nodes:
        p = source.nodes[v]
        best_node = target.nearest_node(p[0], p[1], buffer)
        node_d = (
            dist(p, target.nodes[best_node]) if best_node is not None else math.inf
        )
        best_edge = None
        edge_d = math.inf
        for key in index.near_point(p, buffer):
            qa, qb = index.segment(key)
            t, proj = project_on_segment(p, qa, qb)
            d = dist(p, proj)
            if d < edge_d:
                edge_d = d
                best_edge = (key, t, proj)
        if node_d <= min(edge_d + 1e-12, buffer):
            snaps[v] = ("node", best_node)
        elif best_edge is not None and edge_d <= buffer:
            snaps[v] = ("edge", *best_edge)
        else:
            snaps[v] = None
    return snaps


def _build_augmented(target: RoadGraph, snaps: dict):
    """Adjacency of the target with temporary nodes split in at snap points.

    Returns (id -> [(neighbor, weight)], source node -> its snap node id).
    """
    adj: dict[int, list[tuple[int, float]]] = {
        v: [(nb, target.edge_length(v, nb)) for nb in target.adj[v]]
        for v in target.nodes
    }
    next_id = (max(target.nodes) + 1) if target.nodes else 0
    per_edge: dict[tuple[int, int], list[tuple[float, int]]] = {}
    points: dict[int, tuple[float, float]] = {}
    snap_node: dict[int, int] = {}
    for v in sorted(snaps):
        snap = snaps[v]
        if snap is None:
            continue
        if snap[0] == "node":
            snap_node[v] = snap[1]
            continue
        _, key, t, point = snap
        temp = next_id
        next_id += 1
        adj[temp] = []
        points[temp] = point
        per_edge.setdefault(key, []).append((t, temp))
        snap_node[v] = temp

    for (a, b), inserts in per_edge.items():
        pa, pb = target.nodes[a], target.nodes[b]
        chain = [(0.0, a, pa)]
        for t, temp in sorted(inserts):
            chain.append((t, temp, points[temp]))
        chain.append((1.0, b, pb))
        # remove the original edge from both endpoints
        adj[a] = [(nb, w) for nb, w in adj[a] if nb != b]
        adj[b] = [(nb, w) for nb, w in adj[b] if nb != a]
        for (_, u, pu), (_, w_id, pw) in zip(chain, chain[1:]):
            weight = dist(pu, pw)
            adj[u].append((w_id, weight))
            adj[w_id].append((u, weight))
    return adj, snap_node


def _dijkstra_adj(
    adj: dict[int, list[tuple[int, float]]], source: int
) -> dict[int, float]:
    dists = {source: 0.0}
    heap = [(0.0, source)]
    while heap:
        d, v = heapq.heappop(heap)
        if d > dists.get(v, math.inf):
            continue
        for nb, w in adj[v]:
            nd = d + w
            if nd < dists.get(nb, math.inf):
                dists[nb] = nd
                heapq.heappush(heap, (nd, nb))
    return dists


def _directed_apls(
    source: RoadGraph,
    target: RoadGraph,
    buffer: float,
    pair_limit: int,
    sample_pairs: int,
    rng: np.random.Generator,
) -> tuple[float, int]:
    index = graph_segment_index(target)
    snaps = _snap_points(source, target, index, buffer)
    adj, snap_node = _build_augmented(target, snaps)

    nodes = sorted(source.nodes)
    if len(nodes) <= pair_limit:
        pairs = [(a, b) for a in nodes for b in nodes if a != b]
    else:
        pairs = []
        n = len(nodes)
        for _ in range(sample_pairs):
            i = int(rng.integers(n))
            j = int(rng.integers(n - 1))
            if j >= i:
                j += 1
            pairs.append((nodes[i], nodes[j]))

    source_dists: dict[int, dict[int, float]] = {}
    target_dists: dict[int, dict[int, float]] = {}
    total = 0.0
    n_p = 0
    for v1, v2 in pairs:
        if v1 not in source_dists:
            source_dists[v1] = dijkstra(source, v1)
        p = source_dists[v1].get(v2, math.inf)
        if not math.isfinite(p) or p <= 0.0:
            continue
        n_p += 1
        s1, s2 = snap_node.get(v1), snap_node.get(v2)
        if s1 is None or s2 is None:
            total += 1.0
            continue
        if s1 not in target_dists:
            target_dists[s1] = _dijkstra_adj(adj, s1)
        p_prime = target_dists[s1].get(s2, math.inf)
        if not math.isfinite(p_prime):
            total += 1.0
            continue
        total += min(1.0, abs(p - p_prime) / p)
    if n_p == 0:
        raise GraphError("no finite-path node pairs for APLS")
    return 1.0 - total / n_p, n_p


def apls(
    source: RoadGraph,
    target: RoadGraph,
    buffer: float = 5.0,
    rdp_tol: float = 1.0,
    max_edge: float = 30.0,
    pair_limit: int = 200,
    sample_pairs: int = 20000,
    seed: int = 0,
) -> float:
    """Symmetric average-path-length similarity in [0, 1].

    Both graphs are chain-simplified and subdivided to max_edge before
    comparison; the two directed scores (source->target and the exchange)
    are averaged.
    """
    if len(source.nodes) < 2 or len(target.nodes) < 2:
        raise GraphError("APLS needs at least 2 nodes per graph")
    src = subdivide(rdp_simplify(source, rdp_tol), max_edge)
    tgt = subdivide(rdp_simplify(target, rdp_tol), max_edge)
    rng = np.random.default_rng(seed)
    forward, _ = _directed_apls(src, tgt, buffer, pair_limit, sample_pairs, rng)
    backward, _ = _directed_apls(tgt, src, buffer, pair_limit, sample_pairs, rng)
    return 0.5 * (forward + backward)


# -- raster comparison ---------------------------------------------------------


def rasterize(
    graph: RoadGraph,
    bbox: tuple[float, float, float, float],
    resolution: float = 2.0,
    half_width_px: float = 2.0,
) -> np.ndarray:
    """Boolean road mask: pixel centers within half_width_px of any edge.

    Row 0 is the top of the bbox (north), matching the likelihood raster
    orientation.
    """
    x0, y0, x1, y1 = bbox
    width = max(1, math.ceil((x1 - x0) / resolution))
    height = max(1, math.ceil((y1 - y0) / resolution))
    mask = np.zeros((height, width), dtype=bool)
    radius = half_width_px * resolution
    for a, b in graph.edges():
        pa, pb = graph.nodes[a], graph.nodes[b]
        cx0 = max(0, int((min(pa[0], pb[0]) - radius - x0) / resolution) - 1)
        cx1 = min(width - 1, int((max(pa[0], pb[0]) + radius - x0) / resolution) + 1)
        ry1 = min(height - 1, int((y1 - (min(pa[1], pb[1]) - radius)) / resolution) + 1)
        ry0 = max(0, int((y1 - (max(pa[1], pb[1]) + radius)) / resolution) - 1)
        for r in range(ry0, ry1 + 1):
            py = y1 - (r + 0.5) * resolution
            for c in range(cx0, cx1 + 1):
                if mask[r, c]:
                    continue
                px = x0 + (c + 0.5) * resolution
                if point_segment_distance((px, py), pa, pb) <= radius:
                    mask[r, c] = True
    return mask


def iou_f1(pred: np.ndarray, gt: np.ndarray) -> tuple[float, float]:
    if pred.shape != gt.shape:
        raise ValueError(f"raster shapes differ: {pred.shape} vs {gt.shape}")
    pred = pred.astype(bool)
    gt = gt.astype(bool)
    inter = float(np.logical_and(pred, gt).sum())
    union = float(np.logical_or(pred, gt).sum())
    if union == 0.0:
        return 1.0, 1.0
    iou = inter / union
    p = inter / pred.sum() if pred.sum() else 0.0
    r = inter / gt.sum() if gt.sum() else 0.0
    f1 = 2 * p * r / (p + r) if (p + r) > 0 else 0.0
    return iou, f1


# -- dataset limits -------------------------------------------------------------


def limits_from_dataset(graphs: list[RoadGraph]) -> Limits:
    """Componentwise extrema of per-node degree, density@100, incident angle."""
    if not graphs:
        raise GraphError("empty dataset")
    max_degree = 0
    max_density = 0
    min_angle = 2.0 * math.pi
    for graph in graphs:
        for node_id in graph.nodes:
            degree, density, angle = local_stats(graph, node_id)
            max_degree = max(max_degree, degree)
            max_density = max(max_density, density[0])
            min_angle = min(min_angle, angle)
    return Limits(max_degree=max_degree, max_density=max_density, min_angle=min_angle)
