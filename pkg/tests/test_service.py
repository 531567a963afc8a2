import json
import math

import numpy as np
import pytest
from fastapi.testclient import TestClient

from ntg.generate import Limits, replay_events
from ntg.graph_io import from_canonical_json
from ntg.net import init_params
from ntg.service import create_app

from conftest import small_config

LIMITS = Limits(max_degree=6, max_density=40, min_angle=math.pi / 10)

PLUS_STROKES = {
    "strokes": [
        [[-80.0, 0.0], [-40.0, 0.0], [0.0, 0.0], [40.0, 0.0], [80.0, 0.0]],
        [[0.0, -80.0], [0.0, -40.0], [0.0, 0.0], [0.0, 40.0], [0.0, 80.0]],
    ],
    "style": 0,
    "seed": 21,
}


@pytest.fixture()
def client():
    params = init_params(
        small_config(offset_range=100.0, hidden_size=8, n_styles=3),
        np.random.default_rng(0),
    )
    app = create_app(params, LIMITS, default_budget_nodes=100)
    with TestClient(app) as c:
        yield c


def create(client, **overrides):
    body = dict(PLUS_STROKES)
    body.update(overrides)
    resp = client.post("/v1/sessions", json=body)
    assert resp.status_code == 200, resp.text
    return resp.json()


def test_styles_listed(client):
    styles = client.get("/v1/styles").json()
    assert [s["id"] for s in styles] == [0, 1, 2]
    assert all("name" in s for s in styles)


def test_create_and_graph_accounting(client):
    info = create(client)
    sid = info["session_id"]
    stepped = client.post(f"/v1/sessions/{sid}/step", params={"n": 20}).json()
    graph = from_canonical_json(client.get(f"/v1/sessions/{sid}/graph").text)
    assert len(graph.nodes) == stepped["nodes"]
    assert graph.edge_count() == stepped["edges"]
    # node count equals seed nodes plus node_added events after the seed
    events = client.get(
        f"/v1/sessions/{sid}/events", params={"follow": "false"}
    ).text.splitlines()
    payloads = [json.loads(line[6:]) for line in events if line.startswith("data: ")]
    added = sum(1 for e in payloads if e["kind"] == "node_added")
    assert added == len(graph.nodes)  # seed nodes are replayed as events too


def test_event_stream_replays_to_graph(client):
    info = create(client)
    sid = info["session_id"]
    client.post(f"/v1/sessions/{sid}/step", params={"n": 30})
    graph_text = client.get(f"/v1/sessions/{sid}/graph").text
    stream = client.get(f"/v1/sessions/{sid}/events", params={"follow": "false"})
    lines = [l[6:] for l in stream.text.splitlines() if l.startswith("data: ")]
    rebuilt = replay_events(lines)
    reference = from_canonical_json(graph_text)
    assert len(rebuilt.nodes) == len(reference.nodes)
    assert rebuilt.edge_count() == reference.edge_count()


def test_two_sessions_same_seed_identical_interleaved(client):
    a = create(client)["session_id"]
    b = create(client)["session_id"]
    for _ in range(6):
        client.post(f"/v1/sessions/{a}/step", params={"n": 3})
        client.post(f"/v1/sessions/{b}/step", params={"n": 3})
    ga = client.get(f"/v1/sessions/{a}/graph").text
    gb = client.get(f"/v1/sessions/{b}/graph").text
    assert ga == gb


def test_delete_then_any_access_is_404(client):
    sid = create(client)["session_id"]
    assert client.delete(f"/v1/sessions/{sid}").status_code == 200
    assert client.post(f"/v1/sessions/{sid}/step").status_code == 404
    assert client.get(f"/v1/sessions/{sid}/graph").status_code == 404
    assert client.delete(f"/v1/sessions/{sid}").status_code == 404


def test_malformed_sketch_rejected(client):
    resp = client.post(
        "/v1/sessions",
        json={"strokes": [[[0.0, 0.0], [0.1, 0.0]]], "seed": 1},
    )
    assert resp.status_code == 400
    resp = client.post("/v1/sessions", json={"strokes": "nope", "seed": 1})
    assert resp.status_code == 422


def test_unknown_style_rejected(client):
    resp = client.post(
        "/v1/sessions", json={**PLUS_STROKES, "style": 99}
    )
    assert resp.status_code == 400


def test_step_on_terminal_session_echoes_status(client):
    sid = create(client)["session_id"]
    # run to exhaustion or budget
    for _ in range(200):
        out = client.post(f"/v1/sessions/{sid}/step", params={"n": 25}).json()
        if out["status"] != "active":
            break
    assert out["status"] in ("exhausted", "budget_reached")
    again = client.post(f"/v1/sessions/{sid}/step", params={"n": 5}).json()
    assert again["steps_run"] == 0
    assert again["status"] == out["status"]


def test_event_stream_resumes_from_offset(client):
    sid = create(client)["session_id"]
    client.post(f"/v1/sessions/{sid}/step", params={"n": 10})
    full = client.get(f"/v1/sessions/{sid}/events", params={"follow": "false"})
    lines = [l for l in full.text.splitlines() if l.startswith("data: ")]
    # a reconnecting client resumes at its last delivered index
    offset = len(lines) // 2
    tail = client.get(
        f"/v1/sessions/{sid}/events",
        params={"follow": "false", "start": offset},
    )
    tail_lines = [l for l in tail.text.splitlines() if l.startswith("data: ")]
    assert tail_lines == lines[offset:]


def test_geojson_export(client):
    sid = create(client)["session_id"]
    resp = client.get(f"/v1/sessions/{sid}/graph", params={"format": "geojson"})
    doc = json.loads(resp.text)
    assert doc["type"] == "FeatureCollection"
