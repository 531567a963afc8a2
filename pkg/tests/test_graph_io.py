import json

import pytest

from ntg.graph import RoadGraph
from ntg.graph_io import (
    from_canonical_json,
    from_geojson,
    to_canonical_json,
    to_geojson,
)

from conftest import random_graph


def test_canonical_format_shape():
    g = RoadGraph()
    g.add_node(1.0, 2.5, 3)
    g.add_node(0.0005, -0.0004, 1)
    g.add_edge(3, 1, "major")
    text = to_canonical_json(g)
    assert text == (
        '{"nodes":[[1,0.001,0.000],[3,1.000,2.500]],"edges":[[1,3,"major"]]}'
    )
    assert json.loads(text)  # stays valid JSON


def test_canonical_round_trip_exact():
    g = random_graph(21, n=18)
    text = to_canonical_json(g)
    again = to_canonical_json(from_canonical_json(text))
    assert again == text


def test_canonical_edges_sorted():
    g = RoadGraph()
    for i in range(4):
        g.add_node(i * 10.0, 0.0)
    g.add_edge(3, 0)
    g.add_edge(2, 1)
    doc = json.loads(to_canonical_json(g))
    assert doc["edges"] == [[0, 3], [1, 2]]


def test_canonical_rejects_garbage():
    with pytest.raises(Exception):
        from_canonical_json("{not json")
    with pytest.raises(Exception):
        from_canonical_json('{"nodes": []}')


def test_geojson_round_trip_topology():
    g = random_graph(22, n=12)
    back = from_geojson(to_geojson(g))
    assert back.edge_count() == g.edge_count()
    assert len(back.nodes) == len(g.nodes)
    assert back.total_length() == pytest.approx(g.total_length(), rel=1e-9)


def test_geojson_preserves_types():
    g = RoadGraph()
    a = g.add_node(0.0, 0.0)
    b = g.add_node(100.0, 0.0)
    g.add_edge(a, b, "major")
    back = from_geojson(to_geojson(g))
    (x, y) = next(iter(back.edges()))
    assert back.get_edge_type(x, y) == "major"
