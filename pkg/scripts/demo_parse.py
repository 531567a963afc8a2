#!/usr/bin/env python3
"""Likelihood-prior parsing demo: render a noisy raster fixture from the toy
grid, parse it back with a trained checkpoint, and report APLS / IOU / F1.

Needs a checkpoint from scripts/train_toy_grid.py (or `ntg train`).
"""

import argparse
import json

from ntg.fixtures import grid_graph
from ntg.generate import Limits
from ntg.metrics import apls, iou_f1, limits_from_dataset, rasterize
from ntg.net import load_checkpoint
from ntg.parse import ParseConfig, parse_with_prior
from ntg.raster import render_likelihood, save_raster
from ntg.graph_io import save_graph


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--checkpoint", default="runs/toy_grid/model.ntgw")
    parser.add_argument("--grid", type=int, default=12)
    parser.add_argument("--noise-sigma", type=float, default=0.1)
    parser.add_argument("--noise-seed", type=int, default=1)
    parser.add_argument("--seed", type=int, default=5)
    parser.add_argument("--temperature", type=float, default=0.0)
    parser.add_argument("--out-graph", default="runs/toy_grid/parsed.json")
    parser.add_argument("--out-raster", default="runs/toy_grid/likelihood.ntgr")
    args = parser.parse_args()

    city = grid_graph(args.grid, args.grid, 100.0)
    raster = render_likelihood(
        city, city.bbox(), resolution=2.0, road_halfwidth=6.0,
        noise_sigma=args.noise_sigma, noise_seed=args.noise_seed, padding=12.0,
    )
    save_raster(raster, args.out_raster)

    params = load_checkpoint(args.checkpoint)
    base = limits_from_dataset([city])
    limits = Limits(base.max_degree, base.max_density + 1, base.min_angle * 0.8)
    parsed = parse_with_prior(
        raster, params,
        ParseConfig(seed=args.seed, temperature=args.temperature),
        limits,
    )
    save_graph(parsed, args.out_graph)

    bbox = city.bbox()
    iou, f1 = iou_f1(rasterize(parsed, bbox), rasterize(city, bbox))
    report = {
        "nodes": len(parsed.nodes),
        "edges": parsed.edge_count(),
        "apls": apls(parsed, city, seed=1),
        "iou": iou,
        "f1": f1,
    }
    print(json.dumps(report, indent=2, sort_keys=True))


if __name__ == "__main__":
    main()
