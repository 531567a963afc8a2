import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ntg.fixtures import grid_graph
from ntg.graph import GraphError, RoadGraph
from ntg.paths import (
    ccw_sort,
    enumerate_incoming_paths,
    motion_sequence,
    polar_motion_sequence,
    sample_incoming_paths,
)

from conftest import random_graph


def test_motion_sequence_differencing():
    coords = {0: (0.0, 0.0), 1: (10.0, 0.0), 2: (10.0, 20.0)}
    assert motion_sequence([0, 1, 2], coords) == [(10.0, 0.0), (0.0, 20.0)]


def test_motion_sequence_single_node():
    assert motion_sequence([0], {0: (5.0, 5.0)}) == []


def test_motion_sequence_matches_loop_oracle(rng):
    g = random_graph(11, n=12)
    ids = sorted(g.nodes)[:8]
    coords = g.nodes
    got = motion_sequence(ids, coords)
    expected = []
    for i in range(len(ids) - 1):
        ax, ay = coords[ids[i]]
        bx, by = coords[ids[i + 1]]
        expected.append((bx - ax, by - ay))
    assert got == expected


def test_polar_straight_line():
    coords = {0: (0.0, 0.0), 1: (10.0, 0.0), 2: (20.0, 0.0)}
    steps = polar_motion_sequence([0, 1, 2], coords)
    assert steps[0] == pytest.approx((10.0, 0.0))
    assert steps[1] == pytest.approx((10.0, 0.0))


def test_polar_left_turn():
    coords = {0: (0.0, 0.0), 1: (10.0, 0.0), 2: (10.0, 10.0)}
    steps = polar_motion_sequence([0, 1, 2], coords)
    assert steps[1][0] == pytest.approx(10.0)
    assert steps[1][1] == pytest.approx(math.pi / 2)


def test_polar_zero_length_segment_rejected():
    coords = {0: (0.0, 0.0), 1: (0.0, 0.0)}
    with pytest.raises(GraphError):
        polar_motion_sequence([0, 1], coords)


@settings(max_examples=60, deadline=None)
@given(
    st.lists(
        st.tuples(st.floats(-100, 100), st.floats(-100, 100)),
        min_size=3,
        max_size=8,
        unique=True,
    ),
    st.floats(-math.pi, math.pi),
    st.tuples(st.floats(-500, 500), st.floats(-500, 500)),
)
def test_polar_rigid_motion_invariance(points, angle, shift):
    ids = list(range(len(points)))
    coords = dict(enumerate(points))
    lengths = [
        math.hypot(b[0] - a[0], b[1] - a[1]) for a, b in zip(points, points[1:])
    ]
    if min(lengths) < 1e-3:
        return
    base = polar_motion_sequence(ids, coords)
    c, s = math.cos(angle), math.sin(angle)
    moved = {
        i: (c * x - s * y + shift[0], s * x + c * y + shift[1])
        for i, (x, y) in coords.items()
    }
    rotated = polar_motion_sequence(ids, moved)
    for (r1, t1), (r2, t2) in zip(base, rotated):
        assert abs(r1 - r2) < 1e-9 * max(1.0, r1)
        assert abs(math.sin(t1) - math.sin(t2)) < 1e-9
        assert abs(math.cos(t1) - math.cos(t2)) < 1e-9


@settings(max_examples=40, deadline=None)
@given(
    st.lists(
        st.tuples(st.floats(-80, 80), st.floats(-80, 80)),
        min_size=2,
        max_size=7,
        unique=True,
    )
)
def test_polar_and_cartesian_interconvertible(points):
    from ntg.paths import polar_to_cartesian

    ids = list(range(len(points)))
    coords = dict(enumerate(points))
    lengths = [
        math.hypot(b[0] - a[0], b[1] - a[1]) for a, b in zip(points, points[1:])
    ]
    if min(lengths) < 1e-3:
        return
    cart = motion_sequence(ids, coords)
    polar = polar_motion_sequence(ids, coords)
    head0 = math.atan2(cart[0][1], cart[0][0])
    back = polar_to_cartesian(polar, initial_heading=head0)
    for (x1, y1), (x2, y2) in zip(cart, back):
        assert abs(x1 - x2) < 1e-9 * max(1.0, abs(x1))
        assert abs(y1 - y2) < 1e-9 * max(1.0, abs(y1))


def test_sample_paths_two_node_graph():
    g = RoadGraph()
    a = g.add_node(0, 0)
    b = g.add_node(10, 0)
    g.add_edge(a, b)
    paths = sample_incoming_paths(g, a, 3, 5, np.random.default_rng(0))
    assert paths == [[b, a]]


def test_sample_paths_isolated_node_errors():
    g = RoadGraph()
    nid = g.add_node(0, 0)
    with pytest.raises(GraphError):
        sample_incoming_paths(g, nid, 3, 5, np.random.default_rng(0))


def test_sample_paths_within_enumerated_set():
    g = grid_graph(5, 5, 100.0)
    center = [v for v in g.nodes if g.nodes[v] == (200.0, 200.0)][0]
    universe = enumerate_incoming_paths(g, center, 3)
    paths = sample_incoming_paths(g, center, 8, 3, np.random.default_rng(5))
    assert len(paths) >= 1
    for p in paths:
        assert tuple(p) in universe
        assert len(p) - 1 <= 3
        assert p[-1] == center
        assert len(set(p)) == len(p)


def test_sample_paths_deterministic():
    g = grid_graph(4, 4, 100.0)
    node = sorted(g.nodes)[5]
    p1 = sample_incoming_paths(g, node, 6, 4, np.random.default_rng(42))
    p2 = sample_incoming_paths(g, node, 6, 4, np.random.default_rng(42))
    assert p1 == p2


def test_ccw_sort_cardinal_order():
    coords = {0: (0.0, 0.0), 1: (10.0, 0.0), 2: (0.0, 10.0), 3: (-10.0, 0.0)}
    assert ccw_sort(coords[0], [3, 2, 1], coords) == [1, 2, 3]
    assert ccw_sort(coords[0], [2, 1], coords) == [1, 2]


def test_ccw_sort_matches_angle_oracle(rng):
    center = (3.0, -2.0)
    coords = {}
    for i in range(20):
        coords[i] = (float(rng.uniform(-50, 50)), float(rng.uniform(-50, 50)))
    order = ccw_sort(center, list(coords), coords)

    def oracle_key(i):
        dx = coords[i][0] - center[0]
        dy = coords[i][1] - center[1]
        ang = math.atan2(dy, dx)
        if ang < 0:
            ang += 2 * math.pi
        return (ang, math.hypot(dx, dy), i)

    assert order == sorted(coords, key=oracle_key)


@given(st.permutations(list(range(8))))
def test_ccw_sort_input_order_invariant(perm):
    rng = np.random.default_rng(9)
    coords = {i: (float(rng.uniform(-9, 9)), float(rng.uniform(-9, 9))) for i in range(8)}
    base = ccw_sort((0.0, 0.0), list(range(8)), coords)
    assert ccw_sort((0.0, 0.0), list(perm), coords) == base
    assert sorted(perm) == sorted(base)
