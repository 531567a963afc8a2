"""Model hyperparameters and the shared offset discretization.

Offsets are binned at `offset_resolution` meters over
[-offset_range, +offset_range], giving 2*range/resolution + 1 bins per axis
(201 at the 1 m / 100 m defaults). The decoder always emits discrete bins;
the encoder consumes either the same bins or continuous polar steps.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass

DISCRETE = "discrete"
POLAR = "polar"


@dataclass(frozen=True)
class ModelConfig:
    hidden_size: int = 500
    embed_size: int = 64
    offset_range: float = 100.0
    offset_resolution: float = 1.0
    max_path_len: int = 10
    max_paths: int = 8
    n_styles: int = 1
    edge_type_head: bool = False
    encoder_mode: str = DISCRETE
    raster_attr: bool = False
    raster_patch: int = 64
    style_names: tuple[str, ...] = ()

    def __post_init__(self):
        if self.hidden_size < 1:
            raise ValueError("hidden_size must be >= 1")
        if self.n_styles < 1:
            raise ValueError("n_styles must be >= 1")
        if self.encoder_mode not in (DISCRETE, POLAR):
            raise ValueError(f"unknown encoder_mode {self.encoder_mode!r}")
        if self.offset_resolution <= 0 or self.offset_range <= 0:
            raise ValueError("offset range and resolution must be positive")
        ratio = self.offset_range / self.offset_resolution
        if abs(ratio - round(ratio)) > 1e-9:
            raise ValueError("offset_range must be a multiple of offset_resolution")
        if self.raster_patch % 4 != 0 or self.raster_patch <= 0:
            raise ValueError("raster_patch must be a positive multiple of 4")

    @property
    def half_bins(self) -> int:
        return int(round(self.offset_range / self.offset_resolution))

    @property
    def n_bins(self) -> int:
        return 2 * self.half_bins + 1

    @property
    def raster_features(self) -> int:
        # patch mean-pooled 4x before the linear projection
        return (self.raster_patch // 4) ** 2

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d["style_names"] = list(self.style_names)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "ModelConfig":
        d = dict(d)
        d["style_names"] = tuple(d.get("style_names", ()))
        return cls(**d)


def offset_to_bin(delta: float, config: ModelConfig) -> int:
    """Map a metric offset to its bin index; out-of-range offsets raise."""
    idx = round(delta / config.offset_resolution) + config.half_bins
    if idx < 0 or idx >= config.n_bins:
        raise ValueError(
            f"offset {delta} m outside +/-{config.offset_range} m representable range"
        )
    return idx


def bin_to_offset(index: int, config: ModelConfig) -> float:
    if index < 0 or index >= config.n_bins:
        raise ValueError(f"bin index {index} out of range")
    return (index - config.half_bins) * config.offset_resolution
