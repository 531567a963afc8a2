"""Planar geometry primitives shared across the toolkit.

All coordinates are metric (x east, y north). Angles are radians measured
counter-clockwise from the +x axis.
"""

from __future__ import annotations

import math

TWO_PI = 2.0 * math.pi


def dist(a: tuple[float, float], b: tuple[float, float]) -> float:
    return math.hypot(b[0] - a[0], b[1] - a[1])


def heading(a: tuple[float, float], b: tuple[float, float]) -> float:
    """Angle of the segment a->b in (-pi, pi]."""
    return math.atan2(b[1] - a[1], b[0] - a[0])


def angle_ccw(a: tuple[float, float], b: tuple[float, float]) -> float:
    """Angle of the segment a->b mapped into [0, 2*pi)."""
    ang = math.atan2(b[1] - a[1], b[0] - a[0])
    if ang < 0.0:
        ang += TWO_PI
    return ang


def wrap_signed(angle: float) -> float:
    """Wrap an angle into (-pi, pi]."""
    a = math.fmod(angle + math.pi, TWO_PI)
    if a < 0.0:
        a += TWO_PI
    a -= math.pi
    # fmod can land exactly on -pi; the convention here is half-open at -pi
    if a <= -math.pi:
        a += TWO_PI
    return a


def point_segment_distance(
    p: tuple[float, float], a: tuple[float, float], b: tuple[float, float]
) -> float:
    """Euclidean distance from point p to the segment [a, b]."""
    ax, ay = a
    bx, by = b
    px, py = p
    dx, dy = bx - ax, by - ay
    seg2 = dx * dx + dy * dy
    if seg2 <= 0.0:
        return math.hypot(px - ax, py - ay)
    t = ((px - ax) * dx + (py - ay) * dy) / seg2
    t = min(1.0, max(0.0, t))
    return math.hypot(px - (ax + t * dx), py - (ay + t * dy))


def project_on_segment(
    p: tuple[float, float], a: tuple[float, float], b: tuple[float, float]
) -> tuple[float, tuple[float, float]]:
    """Return (t, point): the closest point on [a, b] and its parameter t in [0, 1]."""
    ax, ay = a
    bx, by = b
    dx, dy = bx - ax, by - ay
    seg2 = dx * dx + dy * dy
    if seg2 <= 0.0:
        return 0.0, a
    t = ((p[0] - ax) * dx + (p[1] - ay) * dy) / seg2
    t = min(1.0, max(0.0, t))
    return t, (ax + t * dx, ay + t * dy)


def _orient(a, b, c) -> float:
    return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])


def _on_segment(a, b, p, eps: float) -> bool:
    return (
        min(a[0], b[0]) - eps <= p[0] <= max(a[0], b[0]) + eps
        and min(a[1], b[1]) - eps <= p[1] <= max(a[1], b[1]) + eps
    )


def segments_cross(
    a1: tuple[float, float],
    a2: tuple[float, float],
    b1: tuple[float, float],
    b2: tuple[float, float],
    endpoint_tol: float = 1e-9,
) -> bool:
    """True when the two segments intersect anywhere except at shared endpoints.

    Proper crossings, T-touches, and collinear overlaps all count as crossings;
    segments meeting only at (numerically) coincident endpoints do not.
    """
    shared = []
    for p in (a1, a2):
        for q in (b1, b2):
            if abs(p[0] - q[0]) <= endpoint_tol and abs(p[1] - q[1]) <= endpoint_tol:
                shared.append((p, q))
    if len(shared) >= 2:
        # identical (or reversed) segments overlap entirely
        return True

    d1 = _orient(b1, b2, a1)
    d2 = _orient(b1, b2, a2)
    d3 = _orient(a1, a2, b1)
    d4 = _orient(a1, a2, b2)

    if ((d1 > 0 and d2 < 0) or (d1 < 0 and d2 > 0)) and (
        (d3 > 0 and d4 < 0) or (d3 < 0 and d4 > 0)
    ):
        return True

    # collinear / touching cases
    scale = max(
        abs(a1[0]), abs(a1[1]), abs(a2[0]), abs(a2[1]),
        abs(b1[0]), abs(b1[1]), abs(b2[0]), abs(b2[1]), 1.0,
    )
    tol = 1e-12 * scale * scale

    def touch(d, seg_a, seg_b, p) -> bool:
        if abs(d) > tol or not _on_segment(seg_a, seg_b, p, endpoint_tol):
            return False
        # a touch at a shared endpoint is fine
        for q, r in shared:
            if p is q or p is r:
                return False
        return True

    if touch(d1, b1, b2, a1) or touch(d2, b1, b2, a2):
        return True
    if touch(d3, a1, a2, b1) or touch(d4, a1, a2, b2):
        return True
    return False


def segment_intersection_point(
    a1: tuple[float, float],
    a2: tuple[float, float],
    b1: tuple[float, float],
    b2: tuple[float, float],
) -> tuple[float, float] | None:
    """Proper intersection point of two segments, or None.

    Collinear overlaps return None; callers noding sketches treat those as
    coincident strokes to be merged instead.
    """
    d1x, d1y = a2[0] - a1[0], a2[1] - a1[1]
    d2x, d2y = b2[0] - b1[0], b2[1] - b1[1]
    denom = d1x * d2y - d1y * d2x
    if denom == 0.0:
        return None
    t = ((b1[0] - a1[0]) * d2y - (b1[1] - a1[1]) * d2x) / denom
    u = ((b1[0] - a1[0]) * d1y - (b1[1] - a1[1]) * d1x) / denom
    if -1e-12 <= t <= 1.0 + 1e-12 and -1e-12 <= u <= 1.0 + 1e-12:
        return (a1[0] + t * d1x, a1[1] + t * d1y)
    return None


def equirectangular(
    lat: float, lon: float, lat0: float, lon0: float, radius: float = 6_371_000.0
) -> tuple[float, float]:
    """Project WGS84 degrees to local meters about (lat0, lon0).

    x = R * dlon * cos(lat0), y = R * dlat. Accurate to well under 1 m over
    city-tile extents, which is all the pipeline needs.
    """
    x = radius * math.radians(lon - lon0) * math.cos(math.radians(lat0))
    y = radius * math.radians(lat - lat0)
    return x, y
