import json
import math
import os

import pytest

from ntg.cli import main
from ntg.fixtures import grid_graph
from ntg.graph_io import load_graph, save_graph
from ntg.templates import star_seed

OSM_DATA = os.path.join(os.path.dirname(__file__), "data", "mini_city.osm")

TRAIN_CFG = """
epochs=3
batch_size=4
hidden_size=10
embed_size=8
max_paths=4
max_path_len=4
"""


@pytest.fixture()
def grid_file(tmp_path):
    path = tmp_path / "grid.json"
    save_graph(grid_graph(5, 5, 100.0), str(path))
    return str(path)


def run(argv):
    return main([str(a) for a in argv])


def train_checkpoint(tmp_path, grid_file):
    cfg = tmp_path / "train.cfg"
    cfg.write_text(TRAIN_CFG)
    ckpt = tmp_path / "model.ntgw"
    code = run(
        ["train", "--config", cfg, "--graph", grid_file, "--out", ckpt,
         "--seed", 5, "--log", tmp_path / "log.jsonl"]
    )
    assert code == 0
    return str(ckpt)


def test_unknown_flag_is_usage_error_naming_the_flag(capsys):
    code = run(["eval", "--pred", "a", "--gt", "b", "--seed", 0, "--bogus-flag"])
    assert code == 1
    assert "--bogus-flag" in capsys.readouterr().err


def test_missing_file_is_data_error(tmp_path, capsys):
    code = run(["limits", "--graphs", tmp_path / "missing.json", "--out", tmp_path / "l.json"])
    assert code == 2


def test_ingest_writes_graph_and_dataset(tmp_path):
    out = tmp_path / "city.json"
    manifest = tmp_path / "manifest.json"
    code = run(
        ["ingest", "--osm", OSM_DATA, "--out", out, "--edge-types",
         "--dataset", manifest, "--name", "mini", "--style", 1, "--seed", 0,
         "--geojson", tmp_path / "city.geojson"]
    )
    assert code == 0
    graph = load_graph(str(out))
    assert len(graph.nodes) == 21
    doc = json.loads(manifest.read_text())
    assert doc["entries"][0]["name"] == "mini"
    assert json.loads((tmp_path / "city.geojson").read_text())["type"] == "FeatureCollection"


def test_limits_command(tmp_path, grid_file):
    out = tmp_path / "limits.json"
    assert run(["limits", "--graphs", grid_file, "--out", out]) == 0
    doc = json.loads(out.read_text())
    assert doc["max_degree"] == 4
    assert doc["max_density"] == 5
    assert doc["min_angle"] == pytest.approx(math.pi / 2)


def test_train_generate_eval_pipeline(tmp_path, grid_file):
    ckpt = train_checkpoint(tmp_path, grid_file)
    limits = tmp_path / "limits.json"
    run(["limits", "--graphs", grid_file, "--out", limits])
    seed_file = tmp_path / "seed.json"
    save_graph(star_seed(4, 100.0, center=(200.0, 200.0)), str(seed_file))

    out1 = tmp_path / "gen1.json"
    out2 = tmp_path / "gen2.json"
    for out in (out1, out2):
        code = run(
            ["generate", "--checkpoint", ckpt, "--limits", limits,
             "--seed-graph", seed_file, "--seed", 7, "--budget-nodes", 15,
             "--out", out, "--events", tmp_path / "events.jsonl"]
        )
        assert code == 0
    assert out1.read_bytes() == out2.read_bytes()  # same seed, same bytes

    report_path = tmp_path / "report.json"
    code = run(
        ["eval", "--pred", grid_file, "--gt", grid_file, "--seed", 1,
         "--out", report_path]
    )
    assert code == 0
    report = json.loads(report_path.read_text())
    assert report["apls"] == pytest.approx(1.0, abs=1e-9)
    assert report["iou"] == 1.0
    assert report["diversity"] == 0.0
    assert "seeds" in report and "params" in report


def test_checkpoint_dir_search(tmp_path, grid_file, monkeypatch):
    ckpt = train_checkpoint(tmp_path, grid_file)
    monkeypatch.setenv("NTG_CHECKPOINT_DIR", os.path.dirname(ckpt))
    limits = tmp_path / "limits.json"
    run(["limits", "--graphs", grid_file, "--out", limits])
    seed_file = tmp_path / "seed.json"
    save_graph(star_seed(4, 100.0, center=(200.0, 200.0)), str(seed_file))
    code = run(
        ["generate", "--checkpoint", os.path.basename(ckpt), "--limits", limits,
         "--seed-graph", seed_file, "--seed", 2, "--budget-nodes", 5,
         "--out", tmp_path / "g.json"]
    )
    assert code == 0


def test_render_and_parse_round_trip_smoke(tmp_path, grid_file):
    ckpt = train_checkpoint(tmp_path, grid_file)
    limits = tmp_path / "limits.json"
    run(["limits", "--graphs", grid_file, "--out", limits])
    raster_path = tmp_path / "grid.ntgr"
    code = run(
        ["render", "--graph", grid_file, "--out", raster_path,
         "--resolution", 2.0, "--halfwidth", 6.0]
    )
    assert code == 0
    out = tmp_path / "parsed.json"
    code = run(
        ["parse", "--raster", raster_path, "--checkpoint", ckpt,
         "--limits", limits, "--seed", 3, "--out", out]
    )
    assert code == 0
    parsed = load_graph(str(out))
    assert len(parsed.nodes) >= 3


def test_serve_requires_config(monkeypatch, capsys):
    monkeypatch.delenv("NTG_CONFIG", raising=False)
    assert run(["serve"]) == 1
    assert "NTG_CONFIG" in capsys.readouterr().err


def test_serve_config_validation(tmp_path, monkeypatch):
    bad = tmp_path / "serve.cfg"
    bad.write_text("mystery_key=1\n")
    monkeypatch.setenv("NTG_CONFIG", str(bad))
    assert run(["serve"]) == 2  # unknown key rejected
    incomplete = tmp_path / "serve2.cfg"
    incomplete.write_text("host=127.0.0.1\n")
    assert run(["serve", "--config", incomplete]) == 2  # missing checkpoint/limits


def test_complete_command(tmp_path, grid_file):
    ckpt = train_checkpoint(tmp_path, grid_file)
    limits = tmp_path / "limits.json"
    run(["limits", "--graphs", grid_file, "--out", limits])
    line = tmp_path / "line.json"
    save_graph(grid_graph(3, 1, 100.0), str(line))
    out = tmp_path / "completed.json"
    code = run(
        ["complete", "--checkpoint", ckpt, "--limits", limits, "--graph", line,
         "--seed", 4, "--budget-nodes", 10, "--out", out]
    )
    assert code == 0
    completed = load_graph(str(out))
    original = load_graph(str(line))
    for v, p in original.nodes.items():
        assert completed.nodes[v] == p
