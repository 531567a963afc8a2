"""Per-node sample extraction and the teacher-forced training loop.

Each non-isolated node of a (pre-subdivided) graph yields one sample per
epoch: freshly resampled incoming random walks as encoder input, and the
node's neighbors, counter-clockwise, as the decoder targets. Resampling
paths every epoch is deliberate; the model should cope with incomplete and
varied views of the local topology.
"""

from __future__ import annotations

import json
import math
import os
import time
from dataclasses import dataclass

import numpy as np

from .configfile import parse_kv
from .graph import MAJOR, RoadGraph
from .graph_ops import subdivide
from .net import (
    AdamState,
    EncodedSample,
    ModelConfig,
    ModelParams,
    adam_step,
    encode,
    init_params,
    loss_and_grad,
    offset_to_bin,
    save_checkpoint,
)
from .net.model import _decode_teacher
from .paths import ccw_sort, motion_sequence, polar_motion_sequence, sample_incoming_paths


@dataclass
class TrainConfig:
    epochs: int = 30
    batch_size: int = 8
    lr: float = 1e-3
    weight_decay: float = 1e-4
    clip: float = 1.0
    seed: int = 0
    checkpoint_every: int = 0  # epochs between checkpoints; 0 = final only

    def __post_init__(self):
        if self.epochs < 1 or self.batch_size < 1:
            raise ValueError("epochs and batch_size must be positive")
        if self.lr <= 0:
            raise ValueError("lr must be positive")


TRAIN_SCHEMA = {
    "epochs": int,
    "batch_size": int,
    "lr": float,
    "weight_decay": float,
    "clip": float,
    "seed": int,
    "checkpoint_every": int,
    "hidden_size": int,
    "embed_size": int,
    "offset_range": float,
    "offset_resolution": float,
    "max_paths": int,
    "max_path_len": int,
    "n_styles": int,
    "edge_type_head": bool,
    "encoder_mode": str,
}

MODEL_KEYS = (
    "hidden_size",
    "embed_size",
    "offset_range",
    "offset_resolution",
    "max_paths",
    "max_path_len",
    "n_styles",
    "edge_type_head",
    "encoder_mode",
)


def parse_train_config(text: str) -> tuple[TrainConfig, dict]:
    """Split a key=value config file into trainer fields and model overrides."""
    values = parse_kv(text, TRAIN_SCHEMA)
    model_kwargs = {k: values.pop(k) for k in list(values) if k in MODEL_KEYS}
    return TrainConfig(**values), model_kwargs


class TrainingDiverged(RuntimeError):
    def __init__(self, epoch: int, last_good: ModelParams):
        super().__init__(f"non-finite loss at epoch {epoch}")
        self.epoch = epoch
        self.last_good = last_good


def prepare_graph(graph: RoadGraph, config: ModelConfig) -> RoadGraph:
    """Subdivide so every edge offset fits the discrete head's range."""
    return subdivide(graph, config.offset_range)


def path_steps(
    graph: RoadGraph, node_ids: list[int], config: ModelConfig, clamp: bool = False
) -> list[tuple]:
    """Motion steps of a path in model space.

    Training data must be strictly representable (clamp=False raises on any
    out-of-range offset). At inference, snapping can stretch an edge to
    offset_range + eps, so the generator clamps those few meters instead of
    failing mid-growth.
    """
    if config.encoder_mode == "polar":
        return polar_motion_sequence(node_ids, graph.nodes)
    steps = motion_sequence(node_ids, graph.nodes)
    if clamp:
        r = config.offset_range
        steps = [(min(r, max(-r, dx)), min(r, max(-r, dy))) for dx, dy in steps]
    return [
        (offset_to_bin(dx, config), offset_to_bin(dy, config)) for dx, dy in steps
    ]


def node_sample(
    graph: RoadGraph,
    node_id: int,
    config: ModelConfig,
    rng: np.random.Generator,
    style: int | None = None,
    sample_id: str = "",
) -> EncodedSample:
    """Build the training sample for one node with freshly sampled paths."""
    walks = sample_incoming_paths(
        graph, node_id, config.max_paths, config.max_path_len, rng
    )
    k = int(rng.integers(1, len(walks) + 1))
    paths = [path_steps(graph, w, config) for w in walks[:k]]

    center = graph.nodes[node_id]
    ordered = ccw_sort(center, list(graph.adj[node_id]), graph.nodes)
    targets = []
    for i, nb in enumerate(ordered):
        nx, ny = graph.nodes[nb]
        bx = offset_to_bin(nx - center[0], config)
        by = offset_to_bin(ny - center[1], config)
        etype = None
        if config.edge_type_head:
            kind = graph.get_edge_type(node_id, nb)
            etype = 0 if kind == MAJOR else 1
        targets.append((bx, by, int(i == len(ordered) - 1), etype))
    return EncodedSample(
        paths=paths, targets=targets, style=style, sample_id=sample_id or str(node_id)
    )


def build_samples(
    graph: RoadGraph,
    config: ModelConfig,
    rng: np.random.Generator,
    style: int | None = None,
) -> list[EncodedSample]:
    """One sample per non-isolated node, in ascending id order."""
    samples = []
    for node_id in sorted(graph.nodes):
        if graph.degree(node_id) == 0:
            continue
        samples.append(node_sample(graph, node_id, config, rng, style))
    return samples


def teacher_accuracy(
    params: ModelParams, samples: list[EncodedSample]
) -> tuple[float, float]:
    """Top-1 bin accuracy per axis under teacher forcing."""
    hits_x = hits_y = total = 0
    for s in samples:
        ctx = encode(params, s.paths, style=s.style, raster_feat=s.raster_feat)
        outputs, _ = _decode_teacher(params, ctx, s.targets)
        for (lx, ly, _ls, _le), (bx, by, _stop, _et) in zip(outputs, s.targets):
            hits_x += int(np.argmax(lx) == bx)
            hits_y += int(np.argmax(ly) == by)
            total += 1
    if total == 0:
        return 0.0, 0.0
    return hits_x / total, hits_y / total


def train(
    dataset: list[tuple[RoadGraph, int | None]],
    model_config: ModelConfig,
    train_config: TrainConfig,
    checkpoint_dir: str | None = None,
    log_path: str | None = None,
) -> tuple[ModelParams, list[dict]]:
    """Shuffled mini-batch training; fully deterministic given the seed.

    Writes one JSON object per epoch to log_path when given. On divergence
    the last finite-loss parameters are kept and TrainingDiverged raised.
    """
    if not dataset:
        raise ValueError("empty training dataset")
    rng = np.random.default_rng(train_config.seed)
    params = init_params(model_config, rng)
    state = AdamState.for_params(params)
    prepped = [(prepare_graph(g, model_config), style) for g, style in dataset]

    log_fh = open(log_path, "w", encoding="utf-8") if log_path else None
    logs: list[dict] = []
    last_good = params.copy()
    start = time.time()
    try:
        for epoch in range(train_config.epochs):
            samples: list[EncodedSample] = []
            for g, style in prepped:
                samples.extend(build_samples(g, model_config, rng, style))
            order = rng.permutation(len(samples))
            epoch_loss = 0.0
            n_batches = 0
            for i in range(0, len(order), train_config.batch_size):
                batch = [samples[j] for j in order[i : i + train_config.batch_size]]
                try:
                    loss, grads = loss_and_grad(params, batch, clip=train_config.clip)
                except ValueError as exc:
                    raise TrainingDiverged(epoch, last_good) from exc
                if not math.isfinite(loss):
                    raise TrainingDiverged(epoch, last_good)
                adam_step(
                    params,
                    grads,
                    state,
                    lr=train_config.lr,
                    weight_decay=train_config.weight_decay,
                )
                epoch_loss += loss
                n_batches += 1
            last_good = params.copy()
            acc_x, acc_y = teacher_accuracy(params, samples)
            entry = {
                "epoch": epoch,
                "loss": epoch_loss / max(1, n_batches),
                "acc_x": acc_x,
                "acc_y": acc_y,
                "accuracy": (acc_x + acc_y) / 2.0,
                "wall_time": time.time() - start,
            }
            logs.append(entry)
            if log_fh:
                log_fh.write(json.dumps(entry) + "\n")
                log_fh.flush()
            if (
                checkpoint_dir
                and train_config.checkpoint_every
                and (epoch + 1) % train_config.checkpoint_every == 0
            ):
                save_checkpoint(
                    params, os.path.join(checkpoint_dir, f"epoch_{epoch:04d}.ntgw")
                )
        if checkpoint_dir:
            save_checkpoint(params, os.path.join(checkpoint_dir, "final.ntgw"))
    finally:
        if log_fh:
            log_fh.close()
    return params, logs
