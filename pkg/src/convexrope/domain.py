"""The cut domain: the rectangle minus the polygon, slit along the escape ray.

Boundary layout (counterclockwise, as positions)::

    0      b_tilde
    1      c_tilde
    2..5   rectangle corners, counterclockwise from the side c lies on
    6      c
    7      b
    8..    the polygon's vertices clockwise from b, ending next to b_tilde

Chain B1 is positions 0..7 and chain B2 is 7..end followed by 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Tuple

from .geometry import GeometryError, Point, Polyline, segment_intersection
from .polygon import (
    NotVisibleFromInfinity,
    SimplePolygon,
    VisibilityCertificate,
    visibility_from_infinity,
)

DEFAULT_MARGIN = 0.25
B_POS = 7


class DomainError(GeometryError):
    pass


def bounding_rectangle(p: SimplePolygon, margin_fraction: float = DEFAULT_MARGIN):
    """Corners (ccw from lower-left) of the bbox inflated by margin * diagonal."""
    if not margin_fraction > 0:
        raise DomainError(f"margin must be positive, got {margin_fraction}")
    x0, y0, x1, y1 = p.bbox()
    pad = margin_fraction * math.hypot(x1 - x0, y1 - y0)
    x0, y0, x1, y1 = x0 - pad, y0 - pad, x1 + pad, y1 + pad
    return ((x0, y0), (x1, y0), (x1, y1), (x0, y1))


@dataclass(frozen=True, eq=False)
class RopeDomain:
    boundary: SimplePolygon
    polygon: SimplePolygon
    b_index: int
    cert: VisibilityCertificate
    rect: Tuple[Point, Point, Point, Point]
    poly_index: Tuple[Optional[int], ...]
    margin_fraction: float = DEFAULT_MARGIN
    _cache: dict = field(default_factory=dict, repr=False)

    @property
    def b(self) -> Point:
        return self.boundary.vertices[B_POS]

    @property
    def b_tilde(self) -> Point:
        return self.boundary.vertices[0]

    @property
    def c(self) -> Point:
        return self.boundary.vertices[B_POS - 1]

    @property
    def c_tilde(self) -> Point:
        return self.boundary.vertices[1]

    @property
    def b1_range(self) -> Tuple[int, int]:
        return (0, B_POS)

    @property
    def b2_range(self) -> Tuple[int, int]:
        """From b's position to one past the end (which wraps to b_tilde)."""
        return (B_POS, len(self.boundary.vertices))

    @property
    def size(self) -> int:
        return len(self.boundary.vertices)

    def b1(self) -> Tuple[Point, ...]:
        return self.boundary.vertices[: B_POS + 1]

    def b2(self) -> Tuple[Point, ...]:
        v = self.boundary.vertices
        return v[B_POS:] + (v[0],)

    def position_of_polygon_vertex(self, k: int) -> int:
        """Boundary position of polygon vertex k (b maps to position 7)."""
        n = self.polygon.n
        k %= n
        if k == self.b_index:
            return B_POS
        return B_POS + (self.b_index - k) % n

    def area(self) -> float:
        (x0, y0), _, (x1, y1), _ = self.rect
        return (x1 - x0) * (y1 - y0) - self.polygon.area()


def _ray_exit(b: Point, d, rect):
    """Exit point of the ray from b and the rectangle side index it crosses.

    Side k runs from corner k to corner k+1 (bottom, right, top, left).
    Returns None for the side when the exit is (numerically) a corner.
    """
    (x0, y0), _, (x1, y1), _ = rect
    dx, dy = d
    tx = math.inf
    ty = math.inf
    if dx > 0:
        tx = (x1 - b[0]) / dx
    elif dx < 0:
        tx = (x0 - b[0]) / dx
    if dy > 0:
        ty = (y1 - b[1]) / dy
    elif dy < 0:
        ty = (y0 - b[1]) / dy
    if math.isfinite(tx) and math.isfinite(ty) and abs(tx - ty) <= 1e-9 * max(tx, ty):
        return None, None
    if tx < ty:
        side = 1 if dx > 0 else 3
        c = (x1 if dx > 0 else x0, b[1] + tx * dy)
    else:
        side = 2 if dy > 0 else 0
        c = (b[0] + ty * dx, y1 if dy > 0 else y0)
    return c, side


def _cut_is_clear(p: SimplePolygon, k: int, c: Point) -> bool:
    v = p.vertices
    n = len(v)
    b = v[k]
    for i in range(n):
        j = (i + 1) % n
        inter = segment_intersection((b, c), (v[i], v[j]))
        if not inter:
            continue
        if inter.kind == "point" and inter.point == b and (i == k or j == k):
            continue
        return False
    return True


def _third_point(cert: VisibilityCertificate) -> Tuple[float, float]:
    ang = math.atan2(cert.ray_direction[1], cert.ray_direction[0]) % (2 * math.pi)
    home = None
    for s, e in cert.free_cone:
        for shift in (0.0, 2 * math.pi):
            if s <= ang + shift <= e:
                home = (s, e)
    if home is None:
        home = cert.widest()
    s, e = home
    t = s + (e - s) / 3.0
    dx, dy = math.cos(t), math.sin(t)
    # clean cos/sin residue so axis-aligned rays stay axis-aligned
    return (0.0 if abs(dx) < 1e-15 else dx, 0.0 if abs(dy) < 1e-15 else dy)


def build_domain(
    p: SimplePolygon,
    b_index: int,
    cert: Optional[VisibilityCertificate] = None,
    margin_fraction: float = DEFAULT_MARGIN,
) -> RopeDomain:
    n = p.n
    k = b_index % n
    if cert is None:
        cert = visibility_from_infinity(p, k)
    if cert.vertex_index != k:
        raise DomainError(f"certificate is for vertex {cert.vertex_index}, not {k}")
    rect = bounding_rectangle(p, margin_fraction)
    b = p.vertices[k]
    c, side = _ray_exit(b, cert.ray_direction, rect)
    if c is None:
        d = _third_point(cert)
        cert = VisibilityCertificate(k, d, cert.free_cone)
        c, side = _ray_exit(b, d, rect)
        if c is None:
            raise DomainError(f"ray from vertex {k} exits through a rectangle corner twice")
    if not _cut_is_clear(p, k, c):
        raise NotVisibleFromInfinity(f"cut from vertex {k} to {c} meets the polygon")

    corners = [rect[(side + 1 + j) % 4] for j in range(4)]
    poly_ring = [p.vertices[(k - j) % n] for j in range(1, n)]
    verts = (b, c) + tuple(corners) + (c, b) + tuple(poly_ring)
    pidx = (k, None, None, None, None, None, None, k) + tuple((k - j) % n for j in range(1, n))
    return RopeDomain(SimplePolygon(verts), p, k, cert, rect, pidx, margin_fraction)


def sp_avoids_b1(path, d: RopeDomain) -> bool:
    """True when the path meets chain B1 only at b (= b_tilde)."""
    pts = path.vertices if isinstance(path, Polyline) else tuple(path)
    b1 = d.b1()
    b = d.b
    if len(pts) == 1:
        return pts[0] == b or all(not segment_intersection((pts[0], pts[0]), e) for e in zip(b1, b1[1:]))
    for seg in zip(pts, pts[1:]):
        for e in zip(b1, b1[1:]):
            inter = segment_intersection(seg, e)
            if not inter:
                continue
            if inter.kind == "point" and inter.point == b:
                continue
            return False
    return True
