"""Planar primitives shared by every other module.

Points are plain ``(x, y)`` tuples of floats. Predicates (orientation and the
classification part of segment intersection) are exact: a floating-point
filter answers the easy cases and anything inside the rounding band is
re-evaluated in rational arithmetic. Constructed points (intersection points)
are ordinary floats.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np

Point = Tuple[float, float]

ANGLE_TOL = 1e-12
TWO_PI = 2.0 * math.pi

# Shewchuk's static bound for the 2x2 orientation determinant.
_CCW_ERRBOUND = (3.0 + 16.0 * 2.0 ** -53) * 2.0 ** -53


class GeometryError(ValueError):
    pass


class DegenerateAngleError(GeometryError):
    pass


def point(x, y) -> Point:
    x = float(x)
    y = float(y)
    if not (math.isfinite(x) and math.isfinite(y)):
        raise GeometryError(f"non-finite coordinate ({x}, {y})")
    return (x, y)


@dataclass(frozen=True)
class Segment:
    p: Point
    q: Point

    @property
    def degenerate(self) -> bool:
        return self.p == self.q

    def reversed(self) -> "Segment":
        return Segment(self.q, self.p)


@dataclass(frozen=True)
class Polyline:
    vertices: Tuple[Point, ...]

    def __post_init__(self):
        if len(self.vertices) < 1:
            raise GeometryError("polyline needs at least one vertex")
        for a, b in zip(self.vertices, self.vertices[1:]):
            if a == b:
                raise GeometryError(f"repeated consecutive vertex {a}")

    @classmethod
    def from_points(cls, pts) -> "Polyline":
        """Build a polyline, silently dropping consecutive duplicates."""
        out = []
        for p in pts:
            p = (float(p[0]), float(p[1]))
            if not out or out[-1] != p:
                out.append(p)
        return cls(tuple(out))

    def __len__(self):
        return len(self.vertices)

    def __iter__(self):
        return iter(self.vertices)

    def length(self) -> float:
        return polyline_length(self)


# ---------------------------------------------------------------------------
# orientation


def _exact_orient(a, b, c) -> int:
    # floats are dyadic rationals: scale to a common power-of-two denominator
    # and finish in integers (much cheaper than Fraction)
    ratios = [float(x).as_integer_ratio() for x in (a[0], a[1], b[0], b[1], c[0], c[1])]
    den = max(d for _, d in ratios)
    ax, ay, bx, by, cx, cy = (n * (den // d) for n, d in ratios)
    det = (bx - ax) * (cy - ay) - (by - ay) * (cx - ax)
    return (det > 0) - (det < 0)


def orientation(a: Point, b: Point, c: Point) -> int:
    """Sign of (b - a) x (c - a): +1 counterclockwise, -1 clockwise, 0 collinear."""
    acx = a[0] - c[0]
    bcx = b[0] - c[0]
    acy = a[1] - c[1]
    bcy = b[1] - c[1]
    detleft = acx * bcy
    detright = acy * bcx
    det = detleft - detright
    bound = _CCW_ERRBOUND * (abs(detleft) + abs(detright))
    if det > bound:
        return 1
    if -det > bound:
        return -1
    if detleft == 0.0 and detright == 0.0 and (acx == 0.0 or bcy == 0.0) and (acy == 0.0 or bcx == 0.0):
        # both products are exactly zero because a factor is exactly zero
        return 0
    return _exact_orient(a, b, c)


def cross(a: Point, b: Point, c: Point) -> float:
    """Floating value of (b - a) x (c - a)."""
    return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])


def dist(a: Point, b: Point) -> float:
    return math.hypot(b[0] - a[0], b[1] - a[1])


def lerp(a: Point, b: Point, t: float) -> Point:
    return (a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1]))


def midpoint(a: Point, b: Point) -> Point:
    return (0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1]))


def on_segment(p: Point, a: Point, b: Point) -> bool:
    """Exact test for p lying on the closed segment [a, b]."""
    if orientation(a, b, p) != 0:
        return False
    return min(a[0], b[0]) <= p[0] <= max(a[0], b[0]) and min(a[1], b[1]) <= p[1] <= max(a[1], b[1])


def strictly_between(p: Point, a: Point, b: Point) -> bool:
    """p on the open segment ]a, b[."""
    return p != a and p != b and on_segment(p, a, b)


# ---------------------------------------------------------------------------
# segment intersection


@dataclass(frozen=True)
class Intersection:
    kind: str  # "empty" | "point" | "overlap"
    point: Optional[Point] = None
    segment: Optional[Segment] = None

    def __bool__(self):
        return self.kind != "empty"


EMPTY = Intersection("empty")


def _line_point(p1, p2, p3, p4) -> Point:
    d1x, d1y = p2[0] - p1[0], p2[1] - p1[1]
    d2x, d2y = p4[0] - p3[0], p4[1] - p3[1]
    den = d1x * d2y - d1y * d2x
    t = ((p3[0] - p1[0]) * d2y - (p3[1] - p1[1]) * d2x) / den
    t = min(1.0, max(0.0, t))
    return (p1[0] + t * d1x, p1[1] + t * d1y)


def segment_intersection(s1, s2) -> Intersection:
    """Classify the intersection of two closed segments.

    Accepts :class:`Segment` objects or ``(p, q)`` pairs. Degenerate
    (single point) segments are allowed.
    """
    p1, p2 = (s1.p, s1.q) if isinstance(s1, Segment) else s1
    p3, p4 = (s2.p, s2.q) if isinstance(s2, Segment) else s2
    if p1 == p2 and p3 == p4:
        return Intersection("point", p1) if p1 == p3 else EMPTY
    if p1 == p2:
        return Intersection("point", p1) if on_segment(p1, p3, p4) else EMPTY
    if p3 == p4:
        return Intersection("point", p3) if on_segment(p3, p1, p2) else EMPTY

    o1 = orientation(p1, p2, p3)
    o2 = orientation(p1, p2, p4)
    o3 = orientation(p3, p4, p1)
    o4 = orientation(p3, p4, p2)

    if o1 == 0 and o2 == 0:
        # collinear: project on the dominant axis
        axis = 0 if abs(p2[0] - p1[0]) >= abs(p2[1] - p1[1]) else 1
        a, b = sorted((p1, p2), key=lambda p: (p[axis], p[1 - axis]))
        c, d = sorted((p3, p4), key=lambda p: (p[axis], p[1 - axis]))
        lo = a if (a[axis], a[1 - axis]) >= (c[axis], c[1 - axis]) else c
        hi = b if (b[axis], b[1 - axis]) <= (d[axis], d[1 - axis]) else d
        klo = (lo[axis], lo[1 - axis])
        khi = (hi[axis], hi[1 - axis])
        if klo > khi:
            return EMPTY
        if klo == khi:
            return Intersection("point", lo)
        return Intersection("overlap", segment=Segment(lo, hi))

    if o1 * o2 > 0 or o3 * o4 > 0:
        return EMPTY
    # touching cases return the exact shared coordinate
    if o1 == 0:
        return Intersection("point", p3)
    if o2 == 0:
        return Intersection("point", p4)
    if o3 == 0:
        return Intersection("point", p1)
    if o4 == 0:
        return Intersection("point", p2)
    return Intersection("point", _line_point(p1, p2, p3, p4))


def segments_cross_properly(p1, p2, p3, p4) -> bool:
    """True when the open segments cross at a single interior point of both."""
    o1 = orientation(p1, p2, p3)
    o2 = orientation(p1, p2, p4)
    if o1 == 0 or o2 == 0 or o1 == o2:
        return False
    o3 = orientation(p3, p4, p1)
    o4 = orientation(p3, p4, p2)
    return o3 != 0 and o4 != 0 and o3 != o4


# ---------------------------------------------------------------------------
# angles


def angle_at(prev: Point, apex: Point, nxt: Point, side_ref: Point) -> float:
    """Angle of the polyline prev-apex-next at apex, on the side containing
    the ray apex->side_ref. The two sides sum to 2*pi."""
    if prev == apex or nxt == apex or side_ref == apex:
        raise DegenerateAngleError("angle_at needs points distinct from the apex")
    d1 = (prev[0] - apex[0], prev[1] - apex[1])
    d2 = (nxt[0] - apex[0], nxt[1] - apex[1])
    ccw = math.atan2(d1[0] * d2[1] - d1[1] * d2[0], d1[0] * d2[0] + d1[1] * d2[1])
    if ccw < 0.0:
        ccw += TWO_PI

    o12 = orientation(apex, prev, nxt)
    o1r = orientation(apex, prev, side_ref)
    or2 = orientation(apex, side_ref, nxt)
    dot12 = d1[0] * d2[0] + d1[1] * d2[1]

    def along(d):
        return d[0] * (side_ref[0] - apex[0]) + d[1] * (side_ref[1] - apex[1]) > 0

    if o12 == 0 and o1r == 0:
        raise DegenerateAngleError("reference collinear with both rays")
    if (o1r == 0 and along(d1)) or (or2 == 0 and along(d2)):
        # reference on a side: both sectors contain it, take the closed convex one
        if o12 == 0:
            return math.pi if dot12 < 0 else TWO_PI
        return min(ccw, TWO_PI - ccw)

    if o12 > 0:
        inside = o1r > 0 and or2 > 0
    elif o12 < 0:
        inside = not (o1r < 0 and or2 < 0)
    elif dot12 < 0:
        inside = o1r > 0
        ccw = math.pi
    else:
        # prev and next on the same ray: zero-width spike
        return TWO_PI
    return ccw if inside else TWO_PI - ccw


# ---------------------------------------------------------------------------
# lengths and distances


def polyline_length(p) -> float:
    pts = p.vertices if isinstance(p, Polyline) else p
    return math.fsum(dist(a, b) for a, b in zip(pts, pts[1:]))


def point_segment_distance(x: Point, a: Point, b: Point) -> float:
    dx, dy = b[0] - a[0], b[1] - a[1]
    den = dx * dx + dy * dy
    if den == 0.0:
        return dist(x, a)
    t = ((x[0] - a[0]) * dx + (x[1] - a[1]) * dy) / den
    t = min(1.0, max(0.0, t))
    return math.hypot(x[0] - a[0] - t * dx, x[1] - a[1] - t * dy)


def _as_array(p) -> np.ndarray:
    pts = p.vertices if isinstance(p, Polyline) else p
    return np.asarray(pts, dtype=float).reshape(-1, 2)


def _dist_to_polyline(xs: np.ndarray, arr: np.ndarray) -> np.ndarray:
    """Distances from points xs (k,2) to the polyline with vertices arr."""
    if len(arr) == 1:
        return np.hypot(xs[:, 0] - arr[0, 0], xs[:, 1] - arr[0, 1])
    a = arr[:-1][None, :, :]
    d = (arr[1:] - arr[:-1])[None, :, :]
    rel = xs[:, None, :] - a
    den = np.einsum("...i,...i", d, d)
    den = np.where(den == 0.0, 1.0, den)
    t = np.clip(np.einsum("...i,...i", rel, d) / den, 0.0, 1.0)
    diff = rel - t[..., None] * d
    return np.sqrt(np.einsum("...i,...i", diff, diff)).min(axis=1)


def _segment_pair_distance(a0, a1, b0s, b1s) -> np.ndarray:
    """Distance from segment [a0, a1] to each segment [b0s[k], b1s[k]]."""
    cand = [
        _pt_seg_many(a0, b0s, b1s),
        _pt_seg_many(a1, b0s, b1s),
        _pt_seg_many_rev(b0s, a0, a1),
        _pt_seg_many_rev(b1s, a0, a1),
    ]
    out = np.minimum.reduce(cand)
    # proper crossings give zero
    d = a1 - a0
    o1 = d[0] * (b0s[:, 1] - a0[1]) - d[1] * (b0s[:, 0] - a0[0])
    o2 = d[0] * (b1s[:, 1] - a0[1]) - d[1] * (b1s[:, 0] - a0[0])
    e = b1s - b0s
    o3 = e[:, 0] * (a0[1] - b0s[:, 1]) - e[:, 1] * (a0[0] - b0s[:, 0])
    o4 = e[:, 0] * (a1[1] - b0s[:, 1]) - e[:, 1] * (a1[0] - b0s[:, 0])
    crossing = (o1 * o2 < 0) & (o3 * o4 < 0)
    return np.where(crossing, 0.0, out)


def _pt_seg_many(x, b0s, b1s):
    d = b1s - b0s
    rel = x[None, :] - b0s
    den = np.einsum("ij,ij->i", d, d)
    den = np.where(den == 0.0, 1.0, den)
    t = np.clip(np.einsum("ij,ij->i", rel, d) / den, 0.0, 1.0)
    diff = rel - t[:, None] * d
    return np.hypot(diff[:, 0], diff[:, 1])


def _pt_seg_many_rev(xs, a0, a1):
    d = a1 - a0
    rel = xs - a0[None, :]
    den = float(d @ d) or 1.0
    t = np.clip(rel @ d / den, 0.0, 1.0)
    diff = rel - t[:, None] * d[None, :]
    return np.hypot(diff[:, 0], diff[:, 1])


def _bisector_params(a0, a1, pts, lines) -> np.ndarray:
    """Parameters t in [0, 1] along [a0, a1] where two distance features tie.

    Features are points (distance to a vertex) and lines given as
    (q, unit normal). The maximum of the lower envelope of the distance
    functions can only occur at such ties or at the segment ends.
    """
    d = a1 - a0
    ts = [np.array([0.0, 1.0])]
    # point-point: |A(t)-p|^2 = |A(t)-q|^2 is linear in t
    if len(pts) > 1:
        P = pts
        i, j = np.triu_indices(len(P), 1)
        p, q = P[i], P[j]
        lhs = 2.0 * ((q - p) @ d)
        rhs = np.einsum("ij,ij->i", q, q) - np.einsum("ij,ij->i", p, p) - 2.0 * ((q - p) @ a0)
        ok = lhs != 0.0
        ts.append(rhs[ok] / lhs[ok])
    # point-line: |A(t)-p|^2 = ((A(t)-q).n)^2, quadratic
    if len(pts) and len(lines):
        P = np.repeat(pts, len(lines), axis=0)
        Q = np.tile(lines[:, :2], (len(pts), 1))
        Nn = np.tile(lines[:, 2:], (len(pts), 1))
        w = a0[None, :] - P
        dn = Nn @ d
        wn = np.einsum("ij,ij->i", a0[None, :] - Q, Nn)
        A = (d @ d) - dn * dn
        B = 2.0 * (w @ d) - 2.0 * dn * wn
        C = np.einsum("ij,ij->i", w, w) - wn * wn
        ts.extend(_quad_roots(A, B, C))
    # line-line: (A(t)-q1).n1 = +-(A(t)-q2).n2
    if len(lines) > 1:
        i, j = np.triu_indices(len(lines), 1)
        q1, n1 = lines[i, :2], lines[i, 2:]
        q2, n2 = lines[j, :2], lines[j, 2:]
        c1 = np.einsum("ij,ij->i", a0[None, :] - q1, n1)
        c2 = np.einsum("ij,ij->i", a0[None, :] - q2, n2)
        s1 = n1 @ d
        s2 = n2 @ d
        for sign in (1.0, -1.0):
            den = s1 - sign * s2
            ok = den != 0.0
            ts.append(-(c1[ok] - sign * c2[ok]) / den[ok])
    t = np.concatenate(ts)
    return t[(t >= 0.0) & (t <= 1.0)]


def _quad_roots(A, B, C):
    out = []
    lin = np.abs(A) < 1e-300
    if lin.any():
        ok = lin & (B != 0.0)
        out.append(-C[ok] / B[ok])
    A, B, C = A[~lin], B[~lin], C[~lin]
    disc = B * B - 4.0 * A * C
    ok = disc >= 0.0
    sq = np.sqrt(disc[ok])
    out.append((-B[ok] + sq) / (2.0 * A[ok]))
    out.append((-B[ok] - sq) / (2.0 * A[ok]))
    return out


def directed_hausdorff(a, b) -> float:
    """sup over the continuous polyline ``a`` of the distance to polyline ``b``."""
    A = _as_array(a)
    B = _as_array(b)
    if len(A) == 1:
        return float(_dist_to_polyline(A, B)[0])
    vert_d = _dist_to_polyline(A, B)
    best = float(vert_d.max())
    if len(B) == 1:
        return best  # distance to a point is convex along each segment
    b0s, b1s = B[:-1], B[1:]
    for k in range(len(A) - 1):
        a0, a1 = A[k], A[k + 1]
        seglen = float(np.hypot(*(a1 - a0)))
        if seglen == 0.0:
            continue
        # 1-Lipschitz bound on the envelope over this segment
        upper = 0.5 * (vert_d[k] + vert_d[k + 1] + seglen)
        if upper <= best:
            continue
        near = _segment_pair_distance(a0, a1, b0s, b1s) <= upper * (1 + 1e-12) + 1e-300
        nb0, nb1 = b0s[near], b1s[near]
        pts = np.unique(np.vstack([nb0, nb1]), axis=0)
        e = nb1 - nb0
        el = np.hypot(e[:, 0], e[:, 1])
        keep = el > 0
        normals = np.stack([-e[keep, 1] / el[keep], e[keep, 0] / el[keep]], axis=1)
        lines = np.hstack([nb0[keep], normals])
        ts = _bisector_params(a0, a1, pts, lines)
        xs = a0[None, :] + ts[:, None] * (a1 - a0)[None, :]
        dvals = _dist_many_segments(xs, nb0, nb1)
        best = max(best, float(dvals.max()))
    return best


def _dist_many_segments(xs, b0s, b1s):
    d = (b1s - b0s)[None, :, :]
    rel = xs[:, None, :] - b0s[None, :, :]
    den = np.einsum("...i,...i", d, d)
    den = np.where(den == 0.0, 1.0, den)
    t = np.clip(np.einsum("...i,...i", rel, d) / den, 0.0, 1.0)
    diff = rel - t[..., None] * d
    return np.sqrt(np.einsum("...i,...i", diff, diff)).min(axis=1)


def hausdorff_distance(a, b) -> float:
    """Hausdorff distance between two continuous polylines."""
    va = a.vertices if isinstance(a, Polyline) else tuple(map(tuple, a))
    vb = b.vertices if isinstance(b, Polyline) else tuple(map(tuple, b))
    if va == vb or va == vb[::-1]:
        return 0.0
    return max(directed_hausdorff(a, b), directed_hausdorff(b, a))


def sampled_hausdorff(a, b, samples_per_segment: int = 2000) -> float:
    """Dense-sampling approximation; slower and only a lower bound. Test oracle."""

    def sample(p):
        arr = _as_array(p)
        if len(arr) == 1:
            return arr
        t = np.linspace(0.0, 1.0, samples_per_segment + 1)
        pts = [arr[i] + t[:, None] * (arr[i + 1] - arr[i]) for i in range(len(arr) - 1)]
        return np.vstack(pts)

    A, B = _as_array(a), _as_array(b)
    return max(float(_dist_to_polyline(sample(A), B).max()), float(_dist_to_polyline(sample(B), A).max()))


def signed_area(pts: Sequence[Point]) -> float:
    n = len(pts)
    s = math.fsum(pts[i][0] * pts[(i + 1) % n][1] - pts[(i + 1) % n][0] * pts[i][1] for i in range(n))
    return 0.5 * s


def rotate(p: Point, angle: float, about: Point = (0.0, 0.0)) -> Point:
    c, s = math.cos(angle), math.sin(angle)
    x, y = p[0] - about[0], p[1] - about[1]
    return (about[0] + c * x - s * y, about[1] + s * x + c * y)


def precise_length(p, digits: int = 60):
    """Length as a Decimal, evaluated from the exact float coordinates.

    Used where consecutive path lengths differ far below double resolution.
    """
    from decimal import Decimal, localcontext

    pts = p.vertices if isinstance(p, Polyline) else p
    with localcontext() as ctx:
        ctx.prec = digits
        total = Decimal(0)
        for a, b in zip(pts, pts[1:]):
            dx = Decimal(b[0]) - Decimal(a[0])
            dy = Decimal(b[1]) - Decimal(a[1])
            total += (dx * dx + dy * dy).sqrt()
    return total
