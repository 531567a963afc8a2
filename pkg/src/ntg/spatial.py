"""Uniform-grid index over line segments, for crossing checks and snapping."""

from __future__ import annotations

import math
from typing import Hashable, Iterable

Point = tuple[float, float]


class SegmentIndex:
    def __init__(self, cell: float = 100.0):
        self.cell = cell
        self._cells: dict[tuple[int, int], list[Hashable]] = {}
        self._segments: dict[Hashable, tuple[Point, Point]] = {}

    def _cover(self, a: Point, b: Point, pad: float = 0.0):
        x0 = math.floor((min(a[0], b[0]) - pad) / self.cell)
        x1 = math.floor((max(a[0], b[0]) + pad) / self.cell)
        y0 = math.floor((min(a[1], b[1]) - pad) / self.cell)
        y1 = math.floor((max(a[1], b[1]) + pad) / self.cell)
        for cx in range(x0, x1 + 1):
            for cy in range(y0, y1 + 1):
                yield (cx, cy)

    def add(self, key: Hashable, a: Point, b: Point) -> None:
        self._segments[key] = (a, b)
        for cell in self._cover(a, b):
            self._cells.setdefault(cell, []).append(key)

    def remove(self, key: Hashable) -> None:
        a, b = self._segments.pop(key)
        for cell in self._cover(a, b):
            bucket = self._cells.get(cell)
            if bucket and key in bucket:
                bucket.remove(key)

    def segment(self, key: Hashable) -> tuple[Point, Point]:
        return self._segments[key]

    def near_segment(self, a: Point, b: Point, pad: float = 0.0) -> list[Hashable]:
        seen: dict[Hashable, None] = {}
        for cell in self._cover(a, b, pad):
            for key in self._cells.get(cell, ()):
                seen[key] = None
        return list(seen)

    def near_point(self, p: Point, radius: float) -> list[Hashable]:
        return self.near_segment(p, p, pad=radius)

    def __len__(self) -> int:
        return len(self._segments)

    @classmethod
    def from_edges(
        cls, edges: Iterable[tuple[Hashable, Point, Point]], cell: float = 100.0
    ) -> "SegmentIndex":
        index = cls(cell)
        for key, a, b in edges:
            index.add(key, a, b)
        return index


def graph_segment_index(graph, cell: float = 100.0) -> SegmentIndex:
    return SegmentIndex.from_edges(
        ((a, b), graph.nodes[a], graph.nodes[b]) for a, b in graph.edges()
    )
