#!/usr/bin/env python3
"""Train a quick toy model (if missing) and serve the interactive API.

Handy for developing the sketch UI against a live backend:
    python scripts/serve_toy.py --port 8600
"""

import argparse
import os

from ntg.fixtures import grid_graph
from ntg.metrics import limits_from_dataset
from ntg.net import ModelConfig, load_checkpoint, save_checkpoint
from ntg.service import run_service
from ntg.training import TrainConfig, train


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--checkpoint", default="runs/toy_grid/model.ntgw")
    parser.add_argument("--host", default="127.0.0.1")
    parser.add_argument("--port", type=int, default=8600)
    parser.add_argument("--epochs", type=int, default=50)
    args = parser.parse_args()

    city = grid_graph(12, 12, 100.0)
    if os.path.exists(args.checkpoint):
        params = load_checkpoint(args.checkpoint)
    else:
        print("no checkpoint found; training the toy grid model first...")
        config = ModelConfig(
            hidden_size=32, embed_size=64, max_paths=8, max_path_len=10,
            style_names=("toy-grid",),
        )
        params, logs = train(
            [(city, None)], config, TrainConfig(epochs=args.epochs, batch_size=4, seed=3)
        )
        os.makedirs(os.path.dirname(args.checkpoint), exist_ok=True)
        save_checkpoint(params, args.checkpoint)
        print(f"trained: accuracy {logs[-1]['accuracy']:.3f}")

    limits = limits_from_dataset([city])
    run_service(params, limits, host=args.host, port=args.port)


if __name__ == "__main__":
    main()
