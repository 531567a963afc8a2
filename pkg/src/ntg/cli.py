"""Operator command line.

Subcommands cover the whole pipeline: ingest OSM extracts, derive
generation limits, train, generate/complete, render synthetic likelihood
rasters, parse rasters back into graphs, evaluate predictions, and serve
the interactive session API. Exit codes: 0 ok, 1 usage error, 2 data error.
Every subcommand that draws random numbers takes a mandatory --seed.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import metrics
from .configfile import ConfigFileError, parse_kv
from .generate import (
    Limits,
    complete,
    event_to_json,
    generate,
    init_session,
    validate_generated,
)
from .graph import GraphError
from .graph_io import load_graph, save_graph, to_geojson
from .graph_ops import crop
from .ingest import Dataset, DatasetEntry, OsmError, assign_split, parse_osm
from .net import ModelConfig, load_checkpoint, save_checkpoint
from .net.checkpoint import CheckpointError
from .parse import ParseConfig, parse_with_prior
from .raster import RasterError, load_raster, render_likelihood, save_raster
from .training import TrainConfig, parse_train_config, train

DATA_ERRORS = (
    GraphError,
    OsmError,
    RasterError,
    CheckpointError,
    ConfigFileError,
    FileNotFoundError,
    ValueError,
)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # usage problems must exit 1, not argparse's 2
        raise UsageError(message)


def _bbox(text: str) -> tuple[float, float, float, float]:
    parts = [float(p) for p in text.split(",")]
    if len(parts) != 4:
        raise ValueError("bbox must be x0,y0,x1,y1")
    return tuple(parts)  # type: ignore[return-value]


def _load_limits(path: str) -> Limits:
    with open(path, "r", encoding="utf-8") as fh:
        doc = json.load(fh)
    return Limits(
        max_degree=int(doc["max_degree"]),
        max_density=int(doc["max_density"]),
        min_angle=float(doc["min_angle"]),
    )


def _save_limits(limits: Limits, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(
            {
                "max_degree": limits.max_degree,
                "max_density": limits.max_density,
                "min_angle": limits.min_angle,
            },
            fh,
            indent=2,
            sort_keys=True,
        )


def _resolve_checkpoint(path: str) -> str:
    if os.path.exists(path):
        return path
    search_dir = os.environ.get("NTG_CHECKPOINT_DIR")
    if search_dir:
        candidate = os.path.join(search_dir, path)
        if os.path.exists(candidate):
            return candidate
    raise FileNotFoundError(f"checkpoint {path!r} not found")


def _write_events(path: str, events) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for event in events:
            fh.write(event_to_json(event) + "\n")


def build_parser() -> _Parser:
    parser = _Parser(prog="ntg", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="OSM XML to canonical graph JSON")
    p.add_argument("--osm", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--edge-types", action="store_true")
    p.add_argument("--crop", type=_bbox, default=None, metavar="X0,Y0,X1,Y1")
    p.add_argument("--geojson", default=None, help="also write a GeoJSON export")
    p.add_argument("--dataset", default=None, help="manifest to append this tile to")
    p.add_argument("--name", default=None)
    p.add_argument("--style", type=int, default=0)
    p.add_argument("--seed", type=int, default=0, help="split-assignment seed")

    p = sub.add_parser("limits", help="derive generation limits from graphs")
    p.add_argument("--graphs", nargs="+", required=True)
    p.add_argument("--out", required=True)

    p = sub.add_parser("train", help="train a model on graph files")
    p.add_argument("--config", required=True, help="key=value training config")
    p.add_argument(
        "--graph",
        action="append",
        required=True,
        metavar="FILE[:STYLE]",
        help="training graph, optionally with a style id",
    )
    p.add_argument("--out", required=True, help="final checkpoint path")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--log", default=None, help="JSONL metrics log")
    p.add_argument("--checkpoint-dir", default=None)

    p = sub.add_parser("generate", help="grow a graph from a seed graph")
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--limits", required=True)
    p.add_argument("--seed-graph", required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--style", type=int, default=None)
    p.add_argument("--temperature", type=float, default=1.0)
    p.add_argument("--budget-nodes", type=int, default=None)
    p.add_argument("--budget-steps", type=int, default=None)
    p.add_argument("--region", type=_bbox, default=None, metavar="X0,Y0,X1,Y1")
    p.add_argument("--region-margin", type=float, default=500.0)
    p.add_argument("--out", required=True)
    p.add_argument("--events", default=None, help="write the event stream here")

    p = sub.add_parser("complete", help="extend a parsed graph at its open ends")
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--limits", required=True)
    p.add_argument("--graph", required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--style", type=int, default=None)
    p.add_argument("--temperature", type=float, default=1.0)
    p.add_argument("--budget-nodes", type=int, default=None)
    p.add_argument("--budget-steps", type=int, default=None)
    p.add_argument("--out", required=True)

    p = sub.add_parser("parse", help="parse a likelihood raster into a graph")
    p.add_argument("--raster", required=True)
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--limits", required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--stop-threshold", type=float, default=0.05)
    p.add_argument("--likelihood-exponent", type=float, default=1.0)
    p.add_argument("--temperature", type=float, default=1.0)
    p.add_argument("--style", type=int, default=None)
    p.add_argument("--out", required=True)
    p.add_argument("--gt", default=None, help="ground-truth graph for a report")
    p.add_argument("--report", default=None)

    p = sub.add_parser("render", help="render a graph into an NTGR raster fixture")
    p.add_argument("--graph", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--resolution", type=float, default=2.0)
    p.add_argument("--halfwidth", type=float, default=6.0)
    p.add_argument("--noise-sigma", type=float, default=0.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--padding", type=float, default=0.0)

    p = sub.add_parser("eval", help="metrics report between two graphs")
    p.add_argument("--pred", required=True)
    p.add_argument("--gt", required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", default=None)

    p = sub.add_parser("serve", help="run the interactive session service")
    p.add_argument("--config", default=None, help="key=value service config")
    p.add_argument("--host", default=None)
    p.add_argument("--port", type=int, default=None)
    return parser


def _evaluate(pred_path: str, gt_path: str, seed: int) -> dict:
    pred = load_graph(pred_path)
    gt = load_graph(gt_path)
    apls_score = metrics.apls(pred, gt, seed=seed)
    bbox_p = pred.bbox()
    bbox_g = gt.bbox()
    bbox = (
        min(bbox_p[0], bbox_g[0]),
        min(bbox_p[1], bbox_g[1]),
        max(bbox_p[2], bbox_g[2]),
        max(bbox_p[3], bbox_g[3]),
    )
    raster_pred = metrics.rasterize(pred, bbox)
    raster_gt = metrics.rasterize(gt, bbox)
    iou, f1 = metrics.iou_f1(raster_pred, raster_gt)
    rng = np.random.default_rng(seed)
    stats_pred = metrics.feature_stats(pred, rng)
    rng = np.random.default_rng(seed)
    stats_gt = metrics.feature_stats(gt, rng)
    return {
        "apls": apls_score,
        "iou": iou,
        "f1": f1,
        "diversity": metrics.diversity(pred, gt),
        "urban_frechet": metrics.frechet_distance(stats_pred, stats_gt),
        "seeds": {"eval": seed},
        "params": {
            "apls_buffer_m": 5.0,
            "apls_rdp_tol_m": 1.0,
            "apls_max_edge_m": 30.0,
            "raster_resolution_m": 2.0,
            "raster_half_width_px": 2.0,
            "diversity_corridor_m": 10.0,
            "diversity_step_m": 1.0,
            "convenience_partners": 32,
        },
    }


SERVE_SCHEMA = {
    "checkpoint": str,
    "limits": str,
    "host": str,
    "port": int,
    "budget_nodes": int,
}


def run(args: argparse.Namespace) -> int:
    if args.command == "ingest":
        with open(args.osm, "rb") as fh:
            graph = parse_osm(fh.read(), edge_types=args.edge_types)
        if args.crop:
            graph = crop(graph, args.crop)
        save_graph(graph, args.out)
        if args.geojson:
            with open(args.geojson, "w", encoding="utf-8") as fh:
                fh.write(to_geojson(graph))
        if args.dataset:
            name = args.name or os.path.splitext(os.path.basename(args.out))[0]
            dataset = (
                Dataset.load(args.dataset)
                if os.path.exists(args.dataset)
                else Dataset()
            )
            center = getattr(graph, "provenance", {}).get("projection_center")
            dataset.add(
                DatasetEntry(
                    name=name,
                    graph_file=args.out,
                    style=args.style,
                    split=assign_split(name, args.seed),
                    source=args.osm,
                    projection_center=center,
                )
            )
            dataset.save(args.dataset)
        print(f"ingested {len(graph.nodes)} nodes / {graph.edge_count()} edges")
        return 0

    if args.command == "limits":
        graphs = [load_graph(path) for path in args.graphs]
        limits = metrics.limits_from_dataset(graphs)
        _save_limits(limits, args.out)
        print(
            f"max_degree={limits.max_degree} max_density={limits.max_density} "
            f"min_angle={limits.min_angle:.6f}"
        )
        return 0

    if args.command == "train":
        with open(args.config, "r", encoding="utf-8") as fh:
            train_cfg, model_kwargs = parse_train_config(fh.read())
        train_cfg.seed = args.seed
        model_cfg = ModelConfig(**model_kwargs)
        dataset = []
        for graph_arg in args.graph:
            path, _, style_text = graph_arg.partition(":")
            style = int(style_text) if style_text else None
            dataset.append((load_graph(path), style))
        params, logs = train(
            dataset,
            model_cfg,
            train_cfg,
            checkpoint_dir=args.checkpoint_dir,
            log_path=args.log,
        )
        save_checkpoint(params, args.out)
        final = logs[-1] if logs else {}
        print(
            f"trained {train_cfg.epochs} epochs; final loss "
            f"{final.get('loss', float('nan')):.4f} accuracy "
            f"{final.get('accuracy', float('nan')):.3f}"
        )
        return 0

    if args.command == "generate":
        params = load_checkpoint(_resolve_checkpoint(args.checkpoint))
        limits = _load_limits(args.limits)
        seed_graph = load_graph(args.seed_graph)
        session = init_session(
            seed_graph,
            args.style,
            limits,
            args.seed,
            region=args.region,
            region_margin=args.region_margin,
        )
        graph = generate(
            session,
            params,
            budget_nodes=args.budget_nodes,
            budget_steps=args.budget_steps,
            temperature=args.temperature,
        )
        validate_generated(graph, limits, seed_graph=seed_graph)
        save_graph(graph, args.out)
        if args.events:
            _write_events(args.events, session.events)
        print(
            f"generated {len(graph.nodes)} nodes / {graph.edge_count()} edges "
            f"({session.status})"
        )
        return 0

    if args.command == "complete":
        params = load_checkpoint(_resolve_checkpoint(args.checkpoint))
        limits = _load_limits(args.limits)
        graph = load_graph(args.graph)
        result = complete(
            graph,
            params,
            args.style,
            limits,
            args.seed,
            budget_nodes=args.budget_nodes,
            budget_steps=args.budget_steps,
            temperature=args.temperature,
        )
        save_graph(result, args.out)
        print(f"completed to {len(result.nodes)} nodes / {result.edge_count()} edges")
        return 0

    if args.command == "parse":
        params = load_checkpoint(_resolve_checkpoint(args.checkpoint))
        limits = _load_limits(args.limits)
        raster = load_raster(args.raster)
        config = ParseConfig(
            stop_threshold=args.stop_threshold,
            likelihood_exponent=args.likelihood_exponent,
            temperature=args.temperature,
            seed=args.seed,
            style=args.style,
        )
        graph = parse_with_prior(raster, params, config, limits)
        save_graph(graph, args.out)
        print(f"parsed {len(graph.nodes)} nodes / {graph.edge_count()} edges")
        if args.gt:
            report = _evaluate(args.out, args.gt, args.seed)
            text = json.dumps(report, indent=2, sort_keys=True)
            if args.report:
                with open(args.report, "w", encoding="utf-8") as fh:
                    fh.write(text)
            print(text)
        return 0

    if args.command == "render":
        graph = load_graph(args.graph)
        raster = render_likelihood(
            graph,
            graph.bbox(),
            resolution=args.resolution,
            road_halfwidth=args.halfwidth,
            noise_sigma=args.noise_sigma,
            noise_seed=args.seed,
            padding=args.padding if args.padding else args.halfwidth * 2,
        )
        save_raster(raster, args.out)
        print(f"rendered {raster.width}x{raster.height} raster")
        return 0

    if args.command == "eval":
        report = _evaluate(args.pred, args.gt, args.seed)
        text = json.dumps(report, indent=2, sort_keys=True)
        if args.out:
            with open(args.out, "w", encoding="utf-8") as fh:
                fh.write(text)
        print(text)
        return 0

    if args.command == "serve":
        from .service import run_service

        config_path = args.config or os.environ.get("NTG_CONFIG")
        if not config_path:
            raise UsageError("serve needs --config or NTG_CONFIG")
        with open(config_path, "r", encoding="utf-8") as fh:
            cfg = parse_kv(fh.read(), SERVE_SCHEMA)
        if "checkpoint" not in cfg or "limits" not in cfg:
            raise ConfigFileError("serve config needs checkpoint= and limits=")
        params = load_checkpoint(_resolve_checkpoint(cfg["checkpoint"]))
        limits = _load_limits(cfg["limits"])
        run_service(
            params,
            limits,
            host=args.host or cfg.get("host", "127.0.0.1"),
            port=args.port or cfg.get("port", 8000),
            budget_nodes=cfg.get("budget_nodes", 2000),
        )
        return 0

    raise UsageError(f"unknown command {args.command!r}")


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    try:
        return run(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except DATA_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
