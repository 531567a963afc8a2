"""Parameter container and initialization.

All tensors live in a flat name -> float64 array dict; the checkpoint codec
and the optimizer iterate that dict, so adding a head means adding names
here and nowhere else.
"""

from __future__ import annotations

import numpy as np

from .config import DISCRETE, POLAR, ModelConfig
from .gru import GATE_NAMES


class ModelParams:
    def __init__(self, config: ModelConfig, tensors: dict[str, np.ndarray]):
        self.config = config
        self.tensors = tensors

    def __getitem__(self, name: str) -> np.ndarray:
        return self.tensors[name]

    def zeros_like(self) -> dict[str, np.ndarray]:
        return {name: np.zeros_like(arr) for name, arr in self.tensors.items()}

    def copy(self) -> "ModelParams":
        return ModelParams(self.config, {k: v.copy() for k, v in self.tensors.items()})

    def check_finite(self) -> None:
        for name, arr in self.tensors.items():
            if not np.all(np.isfinite(arr)):
                raise ValueError(f"non-finite values in parameter {name}")


def _gru_shapes(in_dim: int, hidden: int) -> dict[str, tuple]:
    shapes = {}
    for g in GATE_NAMES:
        if g.startswith("W"):
            shapes[g] = (hidden, in_dim)
        elif g.startswith("U"):
            shapes[g] = (hidden, hidden)
        else:
            shapes[g] = (hidden,)
    return shapes


def tensor_shapes(config: ModelConfig) -> dict[str, tuple]:
    h = config.hidden_size
    e = config.embed_size
    n_bins = config.n_bins
    enc_in = 2 * e
    dec_in = 2 * h + e + 2 * e  # context (2h + attr) then previous-offset embedding

    shapes: dict[str, tuple] = {
        "embed_x": (n_bins, e),
        "embed_y": (n_bins, e),
        "attr_embed": (config.n_styles, e),
        "start_token": (2 * e,),
        "out_x.W": (n_bins, h),
        "out_x.b": (n_bins,),
        "out_y.W": (n_bins, h),
        "out_y.b": (n_bins,),
        "stop.w": (h,),
        "stop.b": (1,),
    }
    for prefix in ("enc_f", "enc_b"):
        for g, shape in _gru_shapes(enc_in, h).items():
            shapes[f"{prefix}.{g}"] = shape
    for g, shape in _gru_shapes(dec_in, h).items():
        shapes[f"dec.{g}"] = shape
    if config.encoder_mode == POLAR:
        shapes["polar_in.W"] = (enc_in, 2)
        shapes["polar_in.b"] = (enc_in,)
    if config.edge_type_head:
        shapes["edge.W"] = (2, h)
        shapes["edge.b"] = (2,)
    if config.raster_attr:
        shapes["raster_in.W"] = (e, config.raster_features)
        shapes["raster_in.b"] = (e,)
    return shapes


EMBED_TENSORS = ("embed_x", "embed_y", "attr_embed", "start_token")


def init_params(config: ModelConfig, rng: np.random.Generator) -> ModelParams:
    """Uniform +/-1/sqrt(fan_in) weights, zero biases, N(0, 0.02) embeddings."""
    tensors: dict[str, np.ndarray] = {}
    for name, shape in tensor_shapes(config).items():
        if name in EMBED_TENSORS:
            tensors[name] = rng.normal(0.0, 0.02, size=shape)
        elif len(shape) >= 2:
            bound = 1.0 / np.sqrt(shape[-1])
            tensors[name] = rng.uniform(-bound, bound, size=shape)
        else:
            tensors[name] = np.zeros(shape)
    return ModelParams(config, tensors)


def zero_params(config: ModelConfig) -> ModelParams:
    tensors = {
        name: np.zeros(shape) for name, shape in tensor_shapes(config).items()
    }
    return ModelParams(config, tensors)
