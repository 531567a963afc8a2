from .config import ModelConfig, bin_to_offset, offset_to_bin
from .params import ModelParams, init_params
from .checkpoint import load_checkpoint, save_checkpoint
from .gru import gru_cell
from .model import (
    EncodedSample,
    decode_rollout,
    decode_step,
    encode,
    loss_and_grad,
    start_embedding,
)
from .adam import AdamState, adam_step, clip_gradients, global_norm

__all__ = [
    "ModelConfig",
    "ModelParams",
    "EncodedSample",
    "AdamState",
    "offset_to_bin",
    "bin_to_offset",
    "init_params",
    "save_checkpoint",
    "load_checkpoint",
    "gru_cell",
    "encode",
    "decode_step",
    "decode_rollout",
    "start_embedding",
    "loss_and_grad",
    "adam_step",
    "clip_gradients",
    "global_norm",
]
