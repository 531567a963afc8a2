"""Likelihood rasters: georeferenced road-probability grids.

Pixel (0,0) is the top-left; `origin` is that pixel's center in meters, so
row r / column c sits at (origin_x + c*res, origin_y - r*res). The binary
NTGR format round-trips bit-exactly, which determinism tests rely on.
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass

import numpy as np

from .geometry import dist
from .graph import GraphError, RoadGraph
from .graph_ops import rdp_simplify

MAGIC = b"NTGR"
VERSION = 1


class RasterError(ValueError):
    pass


@dataclass
class LikelihoodRaster:
    origin: tuple[float, float]  # meters of the top-left pixel center
    resolution: float            # meters per pixel
    values: np.ndarray           # (height, width) float32 in [0, 1]

    def __post_init__(self):
        values = np.asarray(self.values)
        if values.ndim != 2 or values.size == 0:
            raise RasterError("raster must be a non-empty 2-D grid")
        if self.resolution <= 0:
            raise RasterError("resolution must be positive")
        if float(values.min()) < 0.0 or float(values.max()) > 1.0:
            raise RasterError("raster values must lie in [0, 1]")
        self.values = values.astype("<f4", copy=False)

    @property
    def height(self) -> int:
        return self.values.shape[0]

    @property
    def width(self) -> int:
        return self.values.shape[1]

    def pixel_center(self, row: int, col: int) -> tuple[float, float]:
        return (
            self.origin[0] + col * self.resolution,
            self.origin[1] - row * self.resolution,
        )

    def bbox(self) -> tuple[float, float, float, float]:
        half = self.resolution / 2.0
        return (
            self.origin[0] - half,
            self.origin[1] - (self.height - 1) * self.resolution - half,
            self.origin[0] + (self.width - 1) * self.resolution + half,
            self.origin[1] + half,
        )

    def sample(self, x: float, y: float) -> float:
        """Bilinear lookup at metric coordinates; zero outside the grid."""
        c = (x - self.origin[0]) / self.resolution
        r = (self.origin[1] - y) / self.resolution
        if c < -0.5 or r < -0.5 or c > self.width - 0.5 or r > self.height - 0.5:
            return 0.0
        c0 = math.floor(c)
        r0 = math.floor(r)
        fc = c - c0
        fr = r - r0

        def at(rr: int, cc: int) -> float:
            if 0 <= rr < self.height and 0 <= cc < self.width:
                return float(self.values[rr, cc])
            return 0.0

        return (
            at(r0, c0) * (1 - fr) * (1 - fc)
            + at(r0, c0 + 1) * (1 - fr) * fc
            + at(r0 + 1, c0) * fr * (1 - fc)
            + at(r0 + 1, c0 + 1) * fr * fc
        )

    def sample_matrix(self, xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
        """Vectorized bilinear lookup: out[i, j] = sample(xs[i], ys[j])."""
        c = (np.asarray(xs, dtype=float) - self.origin[0]) / self.resolution
        r = (self.origin[1] - np.asarray(ys, dtype=float)) / self.resolution
        cg, rg = np.meshgrid(c, r, indexing="ij")
        c0 = np.floor(cg).astype(int)
        r0 = np.floor(rg).astype(int)
        fc = cg - c0
        fr = rg - r0
        vals = self.values.astype(float)

        def at(rr: np.ndarray, cc: np.ndarray) -> np.ndarray:
            valid = (rr >= 0) & (rr < self.height) & (cc >= 0) & (cc < self.width)
            out = np.zeros(rr.shape)
            out[valid] = vals[rr[valid], cc[valid]]
            return out

        result = (
            at(r0, c0) * (1 - fr) * (1 - fc)
            + at(r0, c0 + 1) * (1 - fr) * fc
            + at(r0 + 1, c0) * fr * (1 - fc)
            + at(r0 + 1, c0 + 1) * fr * fc
        )
        outside = (
            (cg < -0.5) | (rg < -0.5)
            | (cg > self.width - 0.5) | (rg > self.height - 0.5)
        )
        result[outside] = 0.0
        return result


def raster_bytes(raster: LikelihoodRaster) -> bytes:
    header = MAGIC + struct.pack(
        "<IIIddd",
        VERSION,
        raster.width,
        raster.height,
        raster.origin[0],
        raster.origin[1],
        raster.resolution,
    )
    return header + np.ascontiguousarray(raster.values, dtype="<f4").tobytes()


def save_raster(raster: LikelihoodRaster, path: str) -> None:
    with open(path, "wb") as fh:
        fh.write(raster_bytes(raster))


def raster_from_bytes(data: bytes) -> LikelihoodRaster:
    if data[:4] != MAGIC:
        raise RasterError("bad raster magic")
    header_size = 4 + struct.calcsize("<IIIddd")
    if len(data) < header_size:
        raise RasterError("truncated raster header")
    version, width, height, ox, oy, resolution = struct.unpack_from("<IIIddd", data, 4)
    if version != VERSION:
        raise RasterError(f"unsupported raster version {version}")
    if width == 0 or height == 0:
        raise RasterError("raster dimensions must be positive")
    expected = header_size + 4 * width * height
    if len(data) != expected:
        raise RasterError(
            f"raster payload length {len(data)} != expected {expected}"
        )
    values = np.frombuffer(data, dtype="<f4", offset=header_size).reshape(
        height, width
    )
    return LikelihoodRaster((ox, oy), resolution, values.copy())


def load_raster(path: str) -> LikelihoodRaster:
    with open(path, "rb") as fh:
        return raster_from_bytes(fh.read())


# -- synthetic rendering -------------------------------------------------------


def _segment_distance_field(
    field: np.ndarray,
    bbox: tuple[float, float, float, float],
    resolution: float,
    pa: tuple[float, float],
    pb: tuple[float, float],
    reach: float,
) -> None:
    x0, _y0, _x1, y1 = bbox
    height, width = field.shape
    c0 = max(0, int((min(pa[0], pb[0]) - reach - x0) / resolution) - 1)
    c1 = min(width - 1, int((max(pa[0], pb[0]) + reach - x0) / resolution) + 1)
    r0 = max(0, int((y1 - (max(pa[1], pb[1]) + reach)) / resolution) - 1)
    r1 = min(height - 1, int((y1 - (min(pa[1], pb[1]) - reach)) / resolution) + 1)
    if c1 < c0 or r1 < r0:
        return
    cols = x0 + (np.arange(c0, c1 + 1) + 0.5) * resolution
    rows = y1 - (np.arange(r0, r1 + 1) + 0.5) * resolution
    px, py = np.meshgrid(cols, rows)
    dx, dy = pb[0] - pa[0], pb[1] - pa[1]
    seg2 = dx * dx + dy * dy
    if seg2 <= 0:
        d = np.hypot(px - pa[0], py - pa[1])
    else:
        t = np.clip(((px - pa[0]) * dx + (py - pa[1]) * dy) / seg2, 0.0, 1.0)
        d = np.hypot(px - (pa[0] + t * dx), py - (pa[1] + t * dy))
    window = field[r0 : r1 + 1, c0 : c1 + 1]
    np.minimum(window, d, out=window)


def render_likelihood(
    graph: RoadGraph,
    bbox: tuple[float, float, float, float],
    resolution: float = 2.0,
    road_halfwidth: float = 6.0,
    noise_sigma: float = 0.0,
    noise_seed: int | None = None,
    padding: float = 0.0,
) -> LikelihoodRaster:
    """Distance-decay road likelihood: clamp(1 - d/halfwidth, 0, 1) plus noise.

    Serves as the synthetic stand-in for a segmentation network's output.
    """
    x0, y0, x1, y1 = bbox
    x0 -= padding
    y0 -= padding
    x1 += padding
    y1 += padding
    if x1 <= x0 or y1 <= y0:
        raise RasterError("degenerate bbox")
    width = max(1, math.ceil((x1 - x0) / resolution))
    height = max(1, math.ceil((y1 - y0) / resolution))
    field = np.full((height, width), np.inf)
    for a, b in graph.edges():
        _segment_distance_field(
            field, (x0, y0, x1, y1), resolution,
            graph.nodes[a], graph.nodes[b], road_halfwidth + resolution,
        )
    values = np.clip(1.0 - field / road_halfwidth, 0.0, 1.0)
    if noise_sigma > 0.0:
        rng = np.random.default_rng(noise_seed)
        values = np.clip(values + rng.normal(0.0, noise_sigma, values.shape), 0.0, 1.0)
    origin = (x0 + resolution / 2.0, y1 - resolution / 2.0)
    return LikelihoodRaster(origin, resolution, values.astype("<f4"))


# -- thinning and vectorization -------------------------------------------------


def zhang_suen(mask: np.ndarray) -> np.ndarray:
    """Iterative two-subpass thinning to a 1-px-wide skeleton."""
    img = np.pad(mask.astype(np.uint8), 1)
    while True:
        changed = False
        for phase in (0, 1):
            p2 = img[:-2, 1:-1]
            p3 = img[:-2, 2:]
            p4 = img[1:-1, 2:]
            p5 = img[2:, 2:]
            p6 = img[2:, 1:-1]
            p7 = img[2:, :-2]
            p8 = img[1:-1, :-2]
            p9 = img[:-2, :-2]
            center = img[1:-1, 1:-1]
            ring = [p2, p3, p4, p5, p6, p7, p8, p9]
            b = sum(ring)
            a = sum(
                ((ring[i] == 0) & (ring[(i + 1) % 8] == 1)).astype(np.uint8)
                for i in range(8)
            )
            if phase == 0:
                m1 = p2 * p4 * p6
                m2 = p4 * p6 * p8
            else:
                m1 = p2 * p4 * p8
                m2 = p2 * p6 * p8
            kill = (
                (center == 1)
                & (b >= 2) & (b <= 6)
                & (a == 1)
                & (m1 == 0) & (m2 == 0)
            )
            if kill.any():
                center[kill] = 0
                changed = True
        if not changed:
            return img[1:-1, 1:-1].astype(bool)


def graph_from_raster(
    raster: LikelihoodRaster, threshold: float = 0.5
) -> RoadGraph:
    """Vectorize a likelihood raster: threshold, thin, trace, simplify.

    Skeleton pixels become nodes (orthogonal adjacency always, diagonal only
    where no orthogonal 2-path exists), then degree-2 chains are simplified
    at 1 px tolerance so junctions and endpoints remain.
    """
    if not (0.0 < threshold < 1.0):
        raise RasterError("threshold must be inside (0, 1)")
    mask = np.asarray(raster.values) >= threshold
    if not mask.any():
        raise RasterError("nothing above threshold")
    skel = zhang_suen(mask)
    rows, cols = np.nonzero(skel)
    graph = RoadGraph()
    pixel_node: dict[tuple[int, int], int] = {}
    for r, c in zip(rows.tolist(), cols.tolist()):
        x, y = raster.pixel_center(r, c)
        pixel_node[(r, c)] = graph.add_node(x, y)

    def on(r: int, c: int) -> bool:
        return (r, c) in pixel_node

    for (r, c), node_id in pixel_node.items():
        if on(r, c + 1):
            graph.add_edge(node_id, pixel_node[(r, c + 1)])
        if on(r + 1, c):
            graph.add_edge(node_id, pixel_node[(r + 1, c)])
        # diagonals only when not shortcutting an orthogonal staircase
        if on(r + 1, c + 1) and not on(r, c + 1) and not on(r + 1, c):
            graph.add_edge(node_id, pixel_node[(r + 1, c + 1)])
        if on(r + 1, c - 1) and not on(r, c - 1) and not on(r + 1, c):
            graph.add_edge(node_id, pixel_node[(r + 1, c - 1)])

    return rdp_simplify(graph, raster.resolution)
