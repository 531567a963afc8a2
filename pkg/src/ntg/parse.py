"""Road parsing from likelihood rasters.

A generatively trained model acts as a topology prior: at every decode slot
the per-axis offset categoricals are combined with the raster likelihood at
each candidate cell of the offset lattice, and offsets are sampled from
that joint. Decoding at a node stops when the best joint score (relative to
the prior's own peak, so a uniform prior scores the raw likelihood) drops
below the stop threshold. Raster evidence can also enter the model as an
attribute vector via mean-pooled patches with a learned projection.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .generate import Limits, init_session, generate
from .graph import GraphError, RoadGraph
from .graph_ops import contract_short_edges, subdivide
from .net import ModelParams, bin_to_offset
from .net.model import draw_index, softmax
from .raster import LikelihoodRaster, graph_from_raster


@dataclass(frozen=True)
class ParseConfig:
    stop_threshold: float = 0.05
    likelihood_exponent: float = 1.0  # 0 disables raster reweighting entirely
    patch_size: int = 64
    temperature: float = 1.0
    seed: int = 0
    binarize_threshold: float = 0.5
    style: int | None = None
    budget_steps: int | None = 20000

    def __post_init__(self):
        if not (0.0 < self.stop_threshold < 1.0):
            raise ValueError("stop_threshold must be inside (0, 1)")
        if self.patch_size % 2 != 0:
            raise ValueError("patch_size must be even")


def select_root(
    raster: LikelihoodRaster, binarize_threshold: float = 0.5
) -> RoadGraph:
    """Seed graph: the most confident junction plus its skeleton neighbors.

    Junction confidence is the mean likelihood over a 5x5 px window. Rasters
    whose skeleton has no junction fall back to the skeleton node nearest
    the global-maximum pixel together with one neighbor.
    """
    skeleton = graph_from_raster(raster, threshold=binarize_threshold)
    # thinning leaves junction-pixel clusters; collapse them before choosing
    skeleton = contract_short_edges(skeleton, 3.0 * raster.resolution)
    values = np.asarray(raster.values, dtype=float)

    def window_mean(x: float, y: float) -> float:
        col = int(round((x - raster.origin[0]) / raster.resolution))
        row = int(round((raster.origin[1] - y) / raster.resolution))
        r0, r1 = max(0, row - 2), min(raster.height, row + 3)
        c0, c1 = max(0, col - 2), min(raster.width, col + 3)
        if r0 >= r1 or c0 >= c1:
            return 0.0
        return float(values[r0:r1, c0:c1].mean())

    junctions = [v for v in sorted(skeleton.nodes) if skeleton.degree(v) >= 3]
    if junctions:
        root = max(junctions, key=lambda v: (window_mean(*skeleton.nodes[v]), -v))
    else:
        row, col = np.unravel_index(int(values.argmax()), values.shape)
        px, py = raster.pixel_center(int(row), int(col))
        root = min(
            skeleton.nodes,
            key=lambda v: (
                (skeleton.nodes[v][0] - px) ** 2 + (skeleton.nodes[v][1] - py) ** 2,
                v,
            ),
        )
    keep = {root, *skeleton.adj[root]}
    return skeleton.subgraph(keep)


class PriorOffsetSampler:
    """Decode-slot sampler multiplying the model prior with raster evidence.

    Weights over the (x_bin, y_bin) lattice are likelihood(position+offset)
    raised to the configured exponent. Each weighting factor is normalized
    by its own maximum, so with exponent 0 the draws reduce bit-for-bit to
    plain generation.
    """

    def __init__(
        self,
        raster: LikelihoodRaster,
        params: ModelParams,
        stop_threshold: float,
        exponent: float,
        dead_zone: float = 5.0,
    ):
        self.raster = raster
        self.stop_threshold = stop_threshold
        self.exponent = exponent
        cfg = params.config
        self.offsets = np.array(
            [bin_to_offset(i, cfg) for i in range(cfg.n_bins)]
        )
        # offsets inside the snap radius can never create a node; without
        # this the evidence keeps re-proposing the road under the turtle
        dx, dy = np.meshgrid(self.offsets, self.offsets, indexing="ij")
        self._live = (np.hypot(dx, dy) > dead_zone).astype(float)

    def _weights(self, position: tuple[float, float]) -> np.ndarray:
        if self.exponent == 0.0:
            return np.ones((len(self.offsets), len(self.offsets)))
        lik = self.raster.sample_matrix(
            position[0] + self.offsets, position[1] + self.offsets
        )
        if self.exponent != 1.0:
            lik = np.power(lik, self.exponent)
        return lik * self._live

    def begin_slot(self, position, logits_x, logits_y, temperature) -> bool:
        greedy = temperature <= 0.0
        t = temperature if not greedy else 1.0
        px = softmax(logits_x / t)
        py = softmax(logits_y / t)
        w = self._weights(position)
        prior = np.outer(px, py)
        joint_max = float((prior * w).max())
        prior_max = float(prior.max())
        if prior_max <= 0.0 or joint_max / prior_max < self.stop_threshold:
            return False
        self._greedy = greedy
        self._px, self._py, self._w = px, py, w
        return True

    def draw(self, rng: np.random.Generator) -> tuple[int, int]:
        if self._greedy:
            flat = int((np.outer(self._px, self._py) * self._w).argmax())
            return flat // len(self._py), flat % len(self._py)
        col_weight = self._w @ self._py
        peak = col_weight.max()
        marginal = self._px * (col_weight / peak) if peak > 0 else self._px
        bx = draw_index(marginal, rng)
        row = self._w[bx]
        row_peak = row.max()
        conditional = self._py * (row / row_peak) if row_peak > 0 else self._py
        by = draw_index(conditional, rng)
        return bx, by


def parse_with_prior(
    raster: LikelihoodRaster,
    params: ModelParams,
    config: ParseConfig,
    limits: Limits,
    eps: float = 5.0,
) -> RoadGraph:
    """Grow a road graph over the raster, guided by likelihood-weighted decoding."""
    seed = select_root(raster, binarize_threshold=config.binarize_threshold)
    seed = subdivide(seed, params.config.offset_range)
    session = init_session(
        seed,
        config.style,
        limits,
        rng_seed=config.seed,
        eps=eps,
        region=raster.bbox(),
    )
    sampler = PriorOffsetSampler(
        raster, params, config.stop_threshold, config.likelihood_exponent,
        dead_zone=eps,
    )
    return generate(
        session,
        params,
        budget_steps=config.budget_steps,
        temperature=config.temperature,
        sampler=sampler,
    )


def pooled_patch_features(
    raster: LikelihoodRaster, position: tuple[float, float], patch: int
) -> np.ndarray:
    """Zero-padded patch centered at position, 4x mean-pooled and flattened."""
    if patch % 4 != 0:
        raise ValueError("patch size must be a multiple of 4")
    col = int(round((position[0] - raster.origin[0]) / raster.resolution))
    row = int(round((raster.origin[1] - position[1]) / raster.resolution))
    half = patch // 2
    window = np.zeros((patch, patch))
    r0, r1 = row - half, row + half
    c0, c1 = col - half, col + half
    sr0, sr1 = max(0, r0), min(raster.height, r1)
    sc0, sc1 = max(0, c0), min(raster.width, c1)
    if sr0 < sr1 and sc0 < sc1:
        window[sr0 - r0 : sr1 - r0, sc0 - c0 : sc1 - c0] = raster.values[
            sr0:sr1, sc0:sc1
        ]
    pooled = window.reshape(patch // 4, 4, patch // 4, 4).mean(axis=(1, 3))
    return pooled.ravel()


def raster_attr(
    raster: LikelihoodRaster,
    position: tuple[float, float],
    patch: int,
    params: ModelParams,
) -> np.ndarray:
    """Attribute vector from local raster evidence via the learned projection."""
    if not params.config.raster_attr:
        raise ValueError("model has no raster attribute projection")
    feat = pooled_patch_features(raster, position, patch)
    if feat.size != params.config.raster_features:
        raise ValueError(
            f"patch features {feat.size} do not match model ({params.config.raster_features})"
        )
    return params["raster_in.W"] @ feat + params["raster_in.b"]
