import heapq
import math

import numpy as np
import pytest
import scipy.linalg

from ntg.fixtures import grid_graph
from ntg.graph import RoadGraph
from ntg.metrics import (
    FeatureStats,
    diversity,
    feature_stats,
    frechet_distance,
    iou_f1,
    limits_from_dataset,
    rasterize,
    urban_features,
)

from conftest import random_graph


def straight_road(n=25, spacing=100.0):
    g = RoadGraph()
    ids = [g.add_node(i * spacing, 0.0) for i in range(n)]
    for a, b in zip(ids, ids[1:]):
        g.add_edge(a, b)
    return g


# -- urban features ------------------------------------------------------------


def test_convenience_is_one_on_straight_road(rng):
    g = straight_road()
    for node_id in (0, 10, 24):
        feats = urban_features(g, node_id, rng)
        assert feats.convenience == pytest.approx(1.0, abs=1e-12)


def test_grid_interior_density_and_degree(rng):
    g = grid_graph(5, 5, 100.0)
    center = [v for v in g.nodes if g.nodes[v] == (200.0, 200.0)][0]
    feats = urban_features(g, center, rng, min_pair_dist=250.0)
    assert feats.density[0] == 5
    assert feats.degree == 4


def test_feature_monotonicity(rng):
    g = random_graph(41, n=30)
    for node_id in sorted(g.nodes):
        feats = urban_features(g, node_id, rng, min_pair_dist=300.0)
        assert feats.density[0] <= feats.density[1] <= feats.density[2]
        assert feats.reach[0] <= feats.reach[1] + 1e-12
        assert feats.reach[1] <= feats.reach[2] + 1e-12
        if feats.convenience is not None:
            assert 0.0 < feats.convenience <= 1.0 + 1e-12


def oracle_reach(graph, source, radius):
    """Independent truncated-Dijkstra reach: simple dict-based implementation."""
    dist = {source: 0.0}
    heap = [(0.0, source)]
    while heap:
        d, v = heapq.heappop(heap)
        if d > dist.get(v, math.inf):
            continue
        for nb in graph.adj[v]:
            nd = d + math.dist(graph.nodes[v], graph.nodes[nb])
            if nd < dist.get(nb, math.inf):
                dist[nb] = nd
                heapq.heappush(heap, (nd, nb))
    total = 0.0
    for a in graph.nodes:
        for b in graph.adj[a]:
            if a >= b:
                continue
            length = math.dist(graph.nodes[a], graph.nodes[b])
            da = dist.get(a, math.inf)
            db = dist.get(b, math.inf)
            cover_a = min(length, max(0.0, radius - da))
            cover_b = min(length, max(0.0, radius - db))
            total += min(length, cover_a + cover_b)
    return total


def test_reach_matches_truncation_oracle(rng):
    for seed in (50, 51):
        g = random_graph(seed, n=20)
        for node_id in sorted(g.nodes)[:6]:
            feats = urban_features(g, node_id, rng, min_pair_dist=300.0)
            for r, got in zip((100.0, 200.0, 300.0), feats.reach):
                assert got == pytest.approx(oracle_reach(g, node_id, r), abs=1e-6)


def test_reach_partial_edge_truncation(rng):
    # a single 100 m edge probed at radius 40 covers 40 m from the source
    g = RoadGraph()
    a = g.add_node(0.0, 0.0)
    b = g.add_node(100.0, 0.0)
    g.add_edge(a, b)
    assert oracle_reach(g, a, 40.0) == pytest.approx(40.0)
    from ntg.metrics import _reach, dijkstra

    assert _reach(g, dijkstra(g, a), 40.0) == pytest.approx(40.0)


# -- frechet ---------------------------------------------------------------------


def random_stats(rng, dim=8):
    mu = rng.normal(size=dim)
    m = rng.normal(size=(dim, dim))
    sigma = m @ m.T / dim
    return FeatureStats(mu, sigma)


def test_frechet_identity_zero(rng):
    stats = random_stats(rng)
    assert frechet_distance(stats, stats) == pytest.approx(0.0, abs=1e-8)


def test_frechet_1d_closed_form():
    a = FeatureStats(np.array([0.0]), np.array([[1.0]]))
    b = FeatureStats(np.array([1.0]), np.array([[4.0]]))
    # (mu1-mu2)^2 + (sigma1-sigma2)^2 with sigmas 1 and 2
    assert frechet_distance(a, b) == pytest.approx(2.0, abs=1e-10)


def test_frechet_symmetric_and_matches_scipy(rng):
    for _ in range(20):
        a = random_stats(rng)
        b = random_stats(rng)
        d_ab = frechet_distance(a, b)
        d_ba = frechet_distance(b, a)
        assert d_ab == pytest.approx(d_ba, abs=1e-8)
        covmean = scipy.linalg.sqrtm(a.sigma @ b.sigma)
        if np.iscomplexobj(covmean):
            covmean = covmean.real
        diff = a.mu - b.mu
        oracle = float(
            diff @ diff + np.trace(a.sigma) + np.trace(b.sigma) - 2 * np.trace(covmean)
        )
        assert d_ab == pytest.approx(oracle, abs=1e-6)
        assert d_ab >= 0.0


def test_frechet_rejects_asymmetric():
    bad = FeatureStats(np.zeros(2), np.array([[1.0, 0.5], [0.0, 1.0]]))
    good = FeatureStats(np.zeros(2), np.eye(2))
    with pytest.raises(ValueError):
        frechet_distance(bad, good)


def test_feature_stats_psd(rng):
    g = random_graph(60, n=25)
    stats = feature_stats(g, rng, min_pair_dist=300.0)
    assert np.allclose(stats.sigma, stats.sigma.T, atol=1e-12)
    assert np.linalg.eigvalsh(stats.sigma).min() >= -1e-9


# -- diversity --------------------------------------------------------------------


def test_diversity_identity_and_separation():
    g = straight_road(6)
    assert diversity(g, g) == 0.0
    far = RoadGraph()
    a = far.add_node(0.0, 10_000.0)
    b = far.add_node(500.0, 10_000.0)
    far.add_edge(a, b)
    assert diversity(g, far) == pytest.approx(100.0)


def test_diversity_symmetric(rng):
    g1 = random_graph(70, n=15)
    g2 = random_graph(71, n=15)
    assert diversity(g1, g2) == pytest.approx(diversity(g2, g1), abs=1e-9)


def oracle_diversity(g1, g2, corridor=10.0, step=0.1):
    def directed(a, b):
        segs = [(b.nodes[x], b.nodes[y]) for x, y in b.edges()]
        outside = total = 0.0
        for u, v in a.edges():
            pu, pv = a.nodes[u], a.nodes[v]
            length = math.dist(pu, pv)
            n = max(1, math.ceil(length / step))
            w = length / n
            for i in range(n):
                t = (i + 0.5) / n
                p = (pu[0] + t * (pv[0] - pu[0]), pu[1] + t * (pv[1] - pu[1]))
                dmin = min(
                    _seg_dist(p, sa, sb) for sa, sb in segs
                )
                total += w
                if dmin > corridor:
                    outside += w
        return outside / total

    return 100.0 * 0.5 * (directed(g1, g2) + directed(g2, g1))


def _seg_dist(p, a, b):
    ax, ay = a
    bx, by = b
    dx, dy = bx - ax, by - ay
    s2 = dx * dx + dy * dy
    if s2 == 0:
        return math.dist(p, a)
    t = max(0.0, min(1.0, ((p[0] - ax) * dx + (p[1] - ay) * dy) / s2))
    return math.dist(p, (ax + t * dx, ay + t * dy))


def test_diversity_close_to_dense_oracle():
    for seed in (80, 81, 82):
        g1 = random_graph(seed, n=12)
        g2 = random_graph(seed + 100, n=12)
        fast = diversity(g1, g2)
        dense = oracle_diversity(g1, g2)
        assert abs(fast - dense) <= 1.0  # within one percentage point


# -- raster comparison ---------------------------------------------------------------


def test_iou_f1_identity_and_disjoint():
    g = straight_road(4)
    bbox = (-10.0, -10.0, 320.0, 10.0)
    r1 = rasterize(g, bbox)
    assert iou_f1(r1, r1) == (1.0, 1.0)
    g2 = RoadGraph()
    a = g2.add_node(0.0, 8.5)
    b = g2.add_node(300.0, 8.5)
    g2.add_edge(a, b)
    # same bbox, far enough apart at half_width 0.5 px
    r_low = rasterize(g, bbox, half_width_px=0.5)
    r2 = rasterize(g2, bbox, half_width_px=0.5)
    iou, f1 = iou_f1(r_low, r2)
    assert iou == 0.0 and f1 == 0.0


def test_iou_half_f1_two_thirds():
    # gt: two congruent disjoint roads; pred: only one of them
    gt = RoadGraph()
    a = gt.add_node(0.0, 0.0)
    b = gt.add_node(200.0, 0.0)
    gt.add_edge(a, b)
    c = gt.add_node(0.0, 100.0)
    d = gt.add_node(200.0, 100.0)
    gt.add_edge(c, d)
    pred = RoadGraph()
    e = pred.add_node(0.0, 0.0)
    f = pred.add_node(200.0, 0.0)
    pred.add_edge(e, f)
    bbox = (-20.0, -20.0, 220.0, 120.0)
    r_gt = rasterize(gt, bbox)
    r_pred = rasterize(pred, bbox)
    iou, f1 = iou_f1(r_pred, r_gt)
    assert iou == pytest.approx(0.5)
    assert f1 == pytest.approx(2.0 / 3.0)


def test_iou_shape_mismatch_errors():
    with pytest.raises(ValueError):
        iou_f1(np.zeros((3, 3), bool), np.zeros((4, 3), bool))


# -- limits -----------------------------------------------------------------------


def test_limits_grid():
    g = grid_graph(6, 6, 100.0)
    limits = limits_from_dataset([g])
    assert limits.max_degree == 4
    assert limits.max_density == 5
    assert limits.min_angle == pytest.approx(math.pi / 2)


def test_limits_union_is_elementwise_extrema():
    g1 = grid_graph(4, 4, 100.0)
    g2 = random_graph(90, n=20)
    l1 = limits_from_dataset([g1])
    l2 = limits_from_dataset([g2])
    both = limits_from_dataset([g1, g2])
    assert both.max_degree == max(l1.max_degree, l2.max_degree)
    assert both.max_density == max(l1.max_density, l2.max_density)
    assert both.min_angle == min(l1.min_angle, l2.min_angle)


def test_limits_match_scan_oracle():
    from ntg.graph import local_stats

    g = random_graph(91, n=25)
    limits = limits_from_dataset([g])
    degrees, densities, angles = [], [], []
    for v in g.nodes:
        deg, dens, ang = local_stats(g, v)
        degrees.append(deg)
        densities.append(dens[0])
        angles.append(ang)
    assert limits.max_degree == max(degrees)
    assert limits.max_density == max(densities)
    assert limits.min_angle == min(angles)
