"""The input polygon: validation, hull, x-monotonicity and visibility from infinity."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .geometry import (
    TWO_PI,
    GeometryError,
    Point,
    on_segment,
    orientation,
    point,
    segment_intersection,
    signed_area,
)


class InvalidPolygonError(GeometryError):
    pass


class NotVisibleFromInfinity(GeometryError):
    """Raised when a vertex has no escaping ray (or a supplied ray is blocked)."""


@dataclass(frozen=True, eq=False)
class SimplePolygon:
    """Counterclockwise vertex ring.

    Construct through :func:`validate`; direct construction skips the checks
    and is used for internal polygons whose validity is known by construction.
    """

    vertices: Tuple[Point, ...]
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def n(self) -> int:
        return len(self.vertices)

    def __len__(self):
        return len(self.vertices)

    def __getitem__(self, i):
        return self.vertices[i % len(self.vertices)]

    def edges(self):
        v = self.vertices
        return [(v[i], v[(i + 1) % len(v)]) for i in range(len(v))]

    def area(self) -> float:
        return signed_area(self.vertices)

    def bbox(self):
        xs = [p[0] for p in self.vertices]
        ys = [p[1] for p in self.vertices]
        return min(xs), min(ys), max(xs), max(ys)

    def diagonal(self) -> float:
        x0, y0, x1, y1 = self.bbox()
        return math.hypot(x1 - x0, y1 - y0)

    def is_reflex(self, i: int) -> bool:
        v = self.vertices
        n = len(v)
        return orientation(v[(i - 1) % n], v[i], v[(i + 1) % n]) < 0

    def as_array(self) -> np.ndarray:
        if "arr" not in self._cache:
            self._cache["arr"] = np.asarray(self.vertices, dtype=float)
        return self._cache["arr"]


# ---------------------------------------------------------------------------
# validation


def _edge_arrays(pts: np.ndarray):
    a = pts
    b = np.roll(pts, -1, axis=0)
    return a, b


def _find_edge_conflict(pts: Sequence[Point], chunk: int = 256):
    """Return a pair of edge indices violating simplicity, or None.

    Float orientation signs are used where they are provably correct; pairs
    inside the rounding band are re-checked exactly.
    """
    n = len(pts)
    arr = np.asarray(pts, dtype=float)
    a, b = _edge_arrays(arr)
    eps = 8.0 * 2.0 ** -53

    def orient_block(p, q, r):
        # p, q: (k,1,2) broadcast against r: (1,m,2) or similar
        l = (q[..., 0] - p[..., 0]) * (r[..., 1] - p[..., 1])
        rr = (q[..., 1] - p[..., 1]) * (r[..., 0] - p[..., 0])
        det = l - rr
        bound = eps * (np.abs(l) + np.abs(rr))
        sign = np.where(det > bound, 1, np.where(det < -bound, -1, 0))
        unsure = np.abs(det) <= bound
        return sign, unsure

    idx = np.arange(n)
    for start in range(0, n, chunk):
        rows = idx[start:start + chunk]
        pa = a[rows][:, None, :]
        pb = b[rows][:, None, :]
        qa = a[None, :, :]
        qb = b[None, :, :]
        o1, u1 = orient_block(pa, pb, qa)
        o2, u2 = orient_block(pa, pb, qb)
        o3, u3 = orient_block(qa, qb, pa)
        o4, u4 = orient_block(qa, qb, pb)
        touching = (o1 * o2 <= 0) & (o3 * o4 <= 0)
        unsure = u1 | u2 | u3 | u4
        cand = touching | unsure
        i_idx, j_idx = np.nonzero(cand)
        for ii, j in zip(i_idx, j_idx):
            i = int(rows[ii])
            j = int(j)
            if j <= i:
                continue
            if _edges_conflict(pts, i, j):
                return i, j
    return None


def _edges_conflict(pts, i, j) -> bool:
    n = len(pts)
    e1 = (pts[i], pts[(i + 1) % n])
    e2 = (pts[j], pts[(j + 1) % n])
    inter = segment_intersection(e1, e2)
    if not inter:
        return False
    adjacent = (j == (i + 1) % n) or (i == (j + 1) % n)
    if not adjacent:
        return True
    if inter.kind == "overlap":
        return True
    shared = pts[j] if j == (i + 1) % n else pts[i]
    return inter.point != shared


def validate(vertices) -> SimplePolygon:
    """Check and normalize a vertex list into a counterclockwise simple polygon."""
    pts = [point(p[0], p[1]) for p in vertices]
    if len(pts) < 3:
        raise InvalidPolygonError(f"need at least 3 vertices, got {len(pts)}")
    if len(set(pts)) != len(pts):
        raise InvalidPolygonError("duplicate vertex")
    if all(orientation(pts[0], pts[1], q) == 0 for q in pts[2:]):
        raise InvalidPolygonError("zero area")
    conflict = _find_edge_conflict(pts)
    if conflict is not None:
        i, j = conflict
        raise InvalidPolygonError(f"self-intersection between edges {i} and {j}")
    area = signed_area(pts)
    if area == 0.0:
        raise InvalidPolygonError("zero area")
    if area < 0:
        pts.reverse()
    return SimplePolygon(tuple(pts))


def is_simple(vertices) -> bool:
    try:
        validate(vertices)
    except InvalidPolygonError:
        return False
    return True


def point_in_polygon(p: Point, verts: Sequence[Point]) -> int:
    """Winding number based test: 1 inside, 0 on the boundary, -1 outside.

    Works for rings with coincident vertices (the slit edges of the rope
    domain cancel in the winding number).
    """
    n = len(verts)
    wn = 0
    for i in range(n):
        a = verts[i]
        b = verts[(i + 1) % n]
        if on_segment(p, a, b):
            return 0
        if a[1] <= p[1]:
            if b[1] > p[1] and orientation(a, b, p) > 0:
                wn += 1
        elif b[1] <= p[1] and orientation(a, b, p) < 0:
            wn -= 1
    return 1 if wn != 0 else -1


# ---------------------------------------------------------------------------
# convex hull


def convex_hull(p: SimplePolygon) -> SimplePolygon:
    """Strict convex hull; vertices kept in the polygon's cyclic order."""
    pts = p.vertices
    order = sorted(range(len(pts)), key=lambda i: pts[i])

    def chain(indices):
        out: List[int] = []
        for i in indices:
            while len(out) >= 2 and orientation(pts[out[-2]], pts[out[-1]], pts[i]) <= 0:
                out.pop()
            out.append(i)
        return out

    lower = chain(order)
    upper = chain(reversed(order))
    hull_idx = set(lower[:-1] + upper[:-1])
    ring = [i for i in range(len(pts)) if i in hull_idx]
    return SimplePolygon(tuple(pts[i] for i in ring))


def hull_indices(p: SimplePolygon) -> List[int]:
    hull = set(convex_hull(p).vertices)
    return [i for i, v in enumerate(p.vertices) if v in hull]


# ---------------------------------------------------------------------------
# x-monotonicity


@dataclass(frozen=True)
class MonotoneSplit:
    monotone: bool
    left: int
    right: int

    def __bool__(self):
        return self.monotone


def is_x_monotone_boundary(p: SimplePolygon) -> MonotoneSplit:
    """Split at the leftmost/rightmost vertices and check both chains.

    The lower chain runs counterclockwise from the leftmost to the rightmost
    vertex with non-decreasing x; the upper chain continues back with
    non-increasing x. Ties on x break by y so the split is unique.
    """
    v = p.vertices
    n = len(v)
    left = min(range(n), key=lambda i: (v[i][0], v[i][1]))
    right = max(range(n), key=lambda i: (v[i][0], v[i][1]))
    ok = True
    i = left
    while i != right:
        j = (i + 1) % n
        if v[j][0] < v[i][0]:
            ok = False
            break
        i = j
    if ok:
        i = right
        while i != left:
            j = (i + 1) % n
            if v[j][0] > v[i][0]:
                ok = False
                break
            i = j
    return MonotoneSplit(ok, left, right)


# ---------------------------------------------------------------------------
# visibility from infinity


@dataclass(frozen=True)
class VisibilityCertificate:
    vertex_index: int
    ray_direction: Tuple[float, float]
    free_cone: Tuple[Tuple[float, float], ...]  # (start, end) angles, ccw, possibly end > 2*pi

    def widest(self) -> Tuple[float, float]:
        return max(self.free_cone, key=lambda iv: (iv[1] - iv[0], -iv[0]))


def _ang(dx, dy) -> float:
    a = math.atan2(dy, dx)
    return a + TWO_PI if a < 0 else a


def _arc(a0: float, a1: float):
    """Counterclockwise arc from a0 to a1 split into pieces inside [0, 2pi]."""
    if a1 >= a0:
        return [(a0, a1)]
    return [(a0, TWO_PI), (0.0, a1)]


def _blocked_arcs(p: SimplePolygon, k: int):
    v = p.vertices
    n = len(v)
    b = v[k]
    nxt = v[(k + 1) % n]
    prv = v[(k - 1) % n]
    # interior cone: ccw from the outgoing edge to the incoming edge
    arcs = _arc(_ang(nxt[0] - b[0], nxt[1] - b[1]), _ang(prv[0] - b[0], prv[1] - b[1]))
    for i in range(n):
        j = (i + 1) % n
        if i == k or j == k:
            continue
        p0, p1 = v[i], v[j]
        t0 = _ang(p0[0] - b[0], p0[1] - b[1])
        t1 = _ang(p1[0] - b[0], p1[1] - b[1])
        o = orientation(b, p0, p1)
        if o > 0:
            arcs.extend(_arc(t0, t1))
        elif o < 0:
            arcs.extend(_arc(t1, t0))
        else:
            arcs.append((t0, t0))
    return arcs


def _free_intervals(blocked) -> List[Tuple[float, float]]:
    blocked = sorted(blocked)
    merged: List[List[float]] = []
    for s, e in blocked:
        if merged and s <= merged[-1][1]:
            merged[-1][1] = max(merged[-1][1], e)
        else:
            merged.append([s, e])
    if not merged:
        return [(0.0, TWO_PI)]
    free = []
    for (s0, e0), (s1, _) in zip(merged, merged[1:]):
        if s1 > e0:
            free.append((e0, s1))
    # wrap-around gap
    wrap_start = merged[-1][1]
    wrap_end = merged[0][0] + TWO_PI
    if wrap_end > wrap_start:
        free.append((wrap_start, wrap_end))
    return [iv for iv in free if iv[1] - iv[0] > 1e-12]


def ray_is_free(p: SimplePolygon, k: int, direction) -> bool:
    """Exact check that the ray from vertex k meets the polygon only at k."""
    v = p.vertices
    n = len(v)
    b = v[k]
    x0, y0, x1, y1 = p.bbox()
    reach = 4.0 * (math.hypot(x1 - x0, y1 - y0) + abs(b[0]) + abs(b[1]) + 1.0)
    norm = math.hypot(direction[0], direction[1])
    if norm == 0.0:
        return False
    far = (b[0] + reach * direction[0] / norm, b[1] + reach * direction[1] / norm)
    for i in range(n):
        j = (i + 1) % n
        inter = segment_intersection((b, far), (v[i], v[j]))
        if not inter:
            continue
        if inter.kind == "point" and inter.point == b and (i == k or j == k):
            continue
        return False
    return True


def visibility_from_infinity(
    p: SimplePolygon, vertex_index: int, ray=None
) -> VisibilityCertificate:
    """Find (or verify) a ray from the vertex that escapes to infinity.

    The free directions are the complement of the interior cone and the
    angular intervals occluded by every non-incident edge. The widest free
    interval is chosen (ties by smallest start angle) and its midpoint
    returned. Raises :class:`NotVisibleFromInfinity` when nothing is free.
    """
    k = vertex_index % p.n
    free = tuple(_free_intervals(_blocked_arcs(p, k)))
    if ray is not None:
        norm = math.hypot(ray[0], ray[1])
        if norm == 0.0 or not ray_is_free(p, k, ray):
            raise NotVisibleFromInfinity(f"supplied ray {ray} from vertex {k} is blocked")
        return VisibilityCertificate(k, (ray[0] / norm, ray[1] / norm), free)
    if not free:
        raise NotVisibleFromInfinity(f"vertex {k} is not visible from infinity")
    s, e = max(free, key=lambda iv: (iv[1] - iv[0], -iv[0]))
    mid = 0.5 * (s + e)
    cert = VisibilityCertificate(k, (math.cos(mid), math.sin(mid)), free)
    if not ray_is_free(p, k, cert.ray_direction):
        # numerically hairline cone; refuse rather than return a bad ray
        raise NotVisibleFromInfinity(f"vertex {k}: free cone too narrow to certify")
    return cert


def sampled_free_directions(p: SimplePolygon, k: int, samples: int = 3600) -> List[float]:
    """Ray-casting oracle: directions (radians) whose ray escapes. Test oracle."""
    out = []
    for s in range(samples):
        t = TWO_PI * (s + 0.5) / samples
        if ray_is_free(p, k, (math.cos(t), math.sin(t))):
            out.append(t)
    return out
