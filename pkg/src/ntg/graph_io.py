"""Graph serialization.

The canonical JSON form is byte-deterministic and is what every determinism
test compares: nodes sorted by id, edges sorted by (min_id, max_id), and
coordinates printed with exactly three decimals (millimeter precision).
GeoJSON is offered for interoperability and is not canonical.
"""

from __future__ import annotations

import json

from .graph import GraphError, RoadGraph


def _fmt(value: float) -> str:
    v = round(float(value), 3)
    if v == 0.0:
        v = 0.0
    return f"{v:.3f}"


def to_canonical_json(graph: RoadGraph) -> str:
    nodes = ",".join(
        f"[{i},{_fmt(x)},{_fmt(y)}]" for i, (x, y) in sorted(graph.nodes.items())
    )
    edge_parts = []
    for a, b in sorted(graph.edges()):
        kind = graph.get_edge_type(a, b)
        if kind is None:
            edge_parts.append(f"[{a},{b}]")
        else:
            edge_parts.append(f'[{a},{b},"{kind}"]')
    return '{"nodes":[' + nodes + '],"edges":[' + ",".join(edge_parts) + "]}"


def from_canonical_json(text: str) -> RoadGraph:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise GraphError(f"invalid graph JSON: {exc}") from exc
    if not isinstance(doc, dict) or "nodes" not in doc or "edges" not in doc:
        raise GraphError("graph JSON must contain 'nodes' and 'edges'")
    graph = RoadGraph()
    for entry in doc["nodes"]:
        node_id, x, y = entry
        graph.add_node(float(x), float(y), int(node_id))
    for entry in doc["edges"]:
        if len(entry) == 2:
            a, b = entry
            kind = None
        else:
            a, b, kind = entry
        graph.add_edge(int(a), int(b), kind)
    return graph


def save_graph(graph: RoadGraph, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(to_canonical_json(graph))


def load_graph(path: str) -> RoadGraph:
    with open(path, "r", encoding="utf-8") as fh:
        return from_canonical_json(fh.read())


def to_geojson(graph: RoadGraph) -> str:
    features = []
    for a, b in sorted(graph.edges()):
        (ax, ay), (bx, by) = graph.nodes[a], graph.nodes[b]
        props = {}
        kind = graph.get_edge_type(a, b)
        if kind is not None:
            props["road_type"] = kind
        features.append(
            {
                "type": "Feature",
                "geometry": {
                    "type": "LineString",
                    "coordinates": [[ax, ay], [bx, by]],
                },
                "properties": props,
            }
        )
    return json.dumps({"type": "FeatureCollection", "features": features})


def from_geojson(text: str) -> RoadGraph:
    doc = json.loads(text)
    graph = RoadGraph()
    for feature in doc.get("features", []):
        geom = feature.get("geometry", {})
        if geom.get("type") != "LineString":
            continue
        coords = geom.get("coordinates", [])
        kind = feature.get("properties", {}).get("road_type")
        prev = None
        for x, y in coords:
            cur = graph.add_or_merge_node(float(x), float(y))
            if prev is not None and prev != cur:
                graph.add_edge(prev, cur, kind)
            prev = cur
    return graph
