#!/usr/bin/env python3
"""Record wire-format fixtures for the frontend contract tests.

Creates a session from the stock "+" sketch against the real service (in
process), plays 50 steps, and captures the event stream plus the graph
snapshot exactly as the HTTP API serves them.
"""

import argparse
import json
import os

import numpy as np
from fastapi.testclient import TestClient

from ntg.fixtures import grid_graph
from ntg.metrics import limits_from_dataset
from ntg.net import ModelConfig, init_params
from ntg.service import create_app

SKETCH = {
    "strokes": [
        [[-80.0, 0.0], [-40.0, 0.0], [0.0, 0.0], [40.0, 0.0], [80.0, 0.0]],
        [[0.0, -80.0], [0.0, -40.0], [0.0, 0.0], [0.0, 40.0], [0.0, 80.0]],
    ],
    "style": 0,
    "seed": 21,
    "temperature": 1.0,
}


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument(
        "--out", default=os.path.join("frontend", "tests", "fixtures")
    )
    parser.add_argument("--steps", type=int, default=50)
    args = parser.parse_args()
    os.makedirs(args.out, exist_ok=True)

    config = ModelConfig(
        hidden_size=16, embed_size=8, max_paths=4, max_path_len=4,
        style_names=("toy-grid",),
    )
    params = init_params(config, np.random.default_rng(0))
    limits = limits_from_dataset([grid_graph(6, 6, 100.0)])
    app = create_app(params, limits, default_budget_nodes=500)

    with TestClient(app) as client:
        created = client.post("/v1/sessions", json=SKETCH).json()
        sid = created["session_id"]
        seed_graph = client.get(f"/v1/sessions/{sid}/graph").text
        step_responses = []
        for _ in range(args.steps):
            step_responses.append(
                client.post(f"/v1/sessions/{sid}/step", params={"n": 1}).json()
            )
        graph = client.get(f"/v1/sessions/{sid}/graph").text
        stream = client.get(f"/v1/sessions/{sid}/events", params={"follow": "false"})
        events = [
            line[6:] for line in stream.text.splitlines() if line.startswith("data: ")
        ]
        styles = client.get("/v1/styles").json()

    fixture = {
        "request": SKETCH,
        "created": created,
        "seed_graph": json.loads(seed_graph),
        "steps": step_responses,
        "events": [json.loads(e) for e in events],
        "graph": json.loads(graph),
        "styles": styles,
    }
    path = os.path.join(args.out, "session50.json")
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(fixture, fh, indent=1)
    print(
        f"wrote {path}: {len(events)} events, "
        f"{len(fixture['graph']['nodes'])} nodes, "
        f"{len(fixture['graph']['edges'])} edges"
    )


if __name__ == "__main__":
    main()
