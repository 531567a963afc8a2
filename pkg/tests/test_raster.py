import math

import numpy as np
import pytest

from ntg.graph import RoadGraph
from ntg.raster import (
    LikelihoodRaster,
    RasterError,
    graph_from_raster,
    load_raster,
    raster_bytes,
    raster_from_bytes,
    render_likelihood,
    save_raster,
    zhang_suen,
)


def single_edge_graph(p0=(0.0, 0.0), p1=(200.0, 0.0)):
    g = RoadGraph()
    a = g.add_node(*p0)
    b = g.add_node(*p1)
    g.add_edge(a, b)
    return g


def test_round_trip_bit_exact(tmp_path, rng):
    values = rng.uniform(0, 1, size=(37, 53)).astype("<f4")
    raster = LikelihoodRaster((12.5, 99.0), 2.0, values)
    path = tmp_path / "r.ntgr"
    save_raster(raster, str(path))
    blob = path.read_bytes()
    again = raster_bytes(load_raster(str(path)))
    assert again == blob


def test_zero_size_rejected():
    with pytest.raises(RasterError):
        LikelihoodRaster((0.0, 0.0), 1.0, np.zeros((0, 5)))


def test_out_of_range_value_rejected():
    with pytest.raises(RasterError):
        LikelihoodRaster((0.0, 0.0), 1.0, np.array([[0.5, 1.0000001]]))
    with pytest.raises(RasterError):
        LikelihoodRaster((0.0, 0.0), 1.0, np.array([[-0.1]]))


def test_truncated_payload_rejected():
    raster = LikelihoodRaster((0.0, 0.0), 1.0, np.zeros((4, 4), "<f4"))
    blob = raster_bytes(raster)
    with pytest.raises(RasterError):
        raster_from_bytes(blob[:-2])
    with pytest.raises(RasterError):
        raster_from_bytes(b"ABCD" + blob[4:])


def test_render_on_edge_and_far_pixels():
    g = single_edge_graph()
    raster = render_likelihood(g, (-10, -10, 210, 10), resolution=2.0, road_halfwidth=6.0)
    # pixel centered on the road axis
    v_on = raster.sample(100.0, 0.0)
    assert v_on == pytest.approx(1.0, abs=0.2)
    # directly query the value grid for a row on the axis
    row = int(round((raster.origin[1] - 0.0) / raster.resolution))
    col = int(round((100.0 - raster.origin[0]) / raster.resolution))
    d_axis = abs(raster.pixel_center(row, col)[1])
    assert raster.values[row, col] == pytest.approx(1.0 - d_axis / 6.0, abs=1e-6)
    # far pixel is exactly zero
    assert raster.values[0, 0] == 0.0


def test_render_matches_bruteforce_distance_scan(rng):
    g = RoadGraph()
    a = g.add_node(0.0, 0.0)
    b = g.add_node(60.0, 40.0)
    c = g.add_node(10.0, 50.0)
    g.add_edge(a, b)
    g.add_edge(b, c)
    raster = render_likelihood(g, (-10, -10, 70, 60), resolution=4.0, road_halfwidth=8.0)
    segs = [(g.nodes[x], g.nodes[y]) for x, y in g.edges()]

    def seg_dist(p, s):
        (ax, ay), (bx, by) = s
        dx, dy = bx - ax, by - ay
        s2 = dx * dx + dy * dy
        t = 0.0 if s2 == 0 else max(0.0, min(1.0, ((p[0] - ax) * dx + (p[1] - ay) * dy) / s2))
        return math.dist(p, (ax + t * dx, ay + t * dy))

    for r in range(raster.height):
        for col in range(raster.width):
            p = raster.pixel_center(r, col)
            d = min(seg_dist(p, s) for s in segs)
            expected = min(1.0, max(0.0, 1.0 - d / 8.0))
            assert raster.values[r, col] == pytest.approx(expected, abs=1e-6)


def test_noise_is_seeded_and_clipped():
    g = single_edge_graph()
    r1 = render_likelihood(g, (-10, -10, 210, 10), noise_sigma=0.1, noise_seed=5)
    r2 = render_likelihood(g, (-10, -10, 210, 10), noise_sigma=0.1, noise_seed=5)
    r3 = render_likelihood(g, (-10, -10, 210, 10), noise_sigma=0.1, noise_seed=6)
    assert raster_bytes(r1) == raster_bytes(r2)
    assert raster_bytes(r1) != raster_bytes(r3)
    assert r1.values.min() >= 0.0 and r1.values.max() <= 1.0


def test_zhang_suen_thins_stripe_to_line():
    mask = np.zeros((21, 60), bool)
    mask[8:13, 5:55] = True
    skel = zhang_suen(mask)
    assert skel.sum() < mask.sum() / 3
    rows = np.nonzero(skel)[0]
    assert rows.max() - rows.min() <= 1  # a thin, nearly straight line


def test_graph_from_stripe_raster():
    values = np.zeros((21, 60), np.float32)
    values[9:12, 5:55] = 1.0
    raster = LikelihoodRaster((0.0, 40.0), 2.0, values)
    g = graph_from_raster(raster, 0.5)
    assert len(g.nodes) == 2
    assert g.edge_count() == 1
    (a, b) = next(iter(g.edges()))
    ya = g.nodes[a][1]
    yb = g.nodes[b][1]
    # the stripe axis sits at row 10 -> y = 40 - 10*2 = 20, within 1 px
    assert abs(ya - 20.0) <= 2.0 and abs(yb - 20.0) <= 2.0


def test_graph_from_plus_raster_recovers_junction():
    values = np.zeros((41, 41), np.float32)
    values[19:22, 3:38] = 1.0
    values[3:38, 19:22] = 1.0
    raster = LikelihoodRaster((0.0, 80.0), 2.0, values)
    g = graph_from_raster(raster, 0.5)
    degrees = sorted(g.degree(v) for v in g.nodes)
    assert degrees.count(4) == 1
    assert degrees.count(1) == 4


def test_graph_from_empty_raster_errors():
    raster = LikelihoodRaster((0.0, 0.0), 1.0, np.zeros((5, 5), np.float32))
    with pytest.raises(RasterError):
        graph_from_raster(raster, 0.5)


def test_sample_matrix_agrees_with_scalar(rng):
    values = rng.uniform(0, 1, size=(20, 30)).astype("<f4")
    raster = LikelihoodRaster((5.0, 50.0), 2.5, values)
    xs = rng.uniform(-10, 90, size=12)
    ys = rng.uniform(-10, 60, size=9)
    mat = raster.sample_matrix(xs, ys)
    for i, x in enumerate(xs):
        for j, y in enumerate(ys):
            assert mat[i, j] == pytest.approx(raster.sample(x, y), abs=1e-12)
