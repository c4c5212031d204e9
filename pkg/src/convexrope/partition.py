"""Cutting segments and the sub-polygons they carve out of the domain.

Boundary positions are real numbers ``e + t``: edge ``e`` of the domain ring
(from vertex e to e+1) at parameter ``t`` in [0, 1). Chain B1 covers [0, 7]
and B2 covers [7, M] where M is the ring size (M wraps to b_tilde).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from .domain import B_POS, RopeDomain
from .geometry import GeometryError, Point, dist, point_segment_distance, segment_intersection
from .polygon import SimplePolygon, is_simple, is_x_monotone_boundary, point_in_polygon


class PartitionError(GeometryError):
    def __init__(self, msg, station=None):
        super().__init__(msg)
        self.station = station


class NonMonotoneError(PartitionError):
    pass


@dataclass(frozen=True)
class CuttingSegment:
    index: int
    u: Point
    v: Point
    u_anchor: Tuple[int, float]
    v_anchor: Tuple[int, float]

    @property
    def u_pos(self) -> float:
        return self.u_anchor[0] + self.u_anchor[1]

    @property
    def v_pos(self) -> float:
        return self.v_anchor[0] + self.v_anchor[1]

    def point_at(self, s: float) -> Point:
        """s = 0 at v, s = 1 at u."""
        if s <= 0.0:
            return self.v
        if s >= 1.0:
            return self.u
        return (self.v[0] + s * (self.u[0] - self.v[0]), self.v[1] + s * (self.u[1] - self.v[1]))

    def length(self) -> float:
        return dist(self.u, self.v)


@dataclass(frozen=True, eq=False)
class Piece:
    """Sub-polygon D_i. Local indices of its chord endpoints are kept so
    shortest-path queries can address them as vertices."""

    index: int
    polygon: SimplePolygon
    domain_index: Tuple[Optional[int], ...]
    lo_u: Optional[int]
    lo_v: Optional[int]
    hi_u: Optional[int]
    hi_v: Optional[int]
    start: Optional[int] = None  # b_tilde, piece 0 only
    end: Optional[int] = None  # b, last piece only

    @property
    def vertices(self):
        return self.polygon.vertices

    @property
    def _cache(self):
        return self.polygon._cache


@dataclass(frozen=True, eq=False)
class Partition:
    domain: RopeDomain
    segments: Tuple[CuttingSegment, ...]
    subpolygons: Tuple[Piece, ...]
    stations: Tuple[float, ...] = ()
    _cache: dict = field(default_factory=dict, repr=False)

    @property
    def n_cuts(self) -> int:
        return len(self.segments)


# ---------------------------------------------------------------------------
# anchors


def locate_on_boundary(d: RopeDomain, q: Point, chain: Optional[int] = None, tol: float = 0.0):
    """Anchor (edge, t) of a boundary point, or None.

    ``chain`` restricts the search to B1 (1) or B2 (2).
    """
    v = d.boundary.vertices
    M = len(v)
    if chain == 1:
        edges = range(0, B_POS)
    elif chain == 2:
        edges = range(B_POS, M)
    else:
        edges = range(M)
    best = None
    for e in edges:
        a, b = v[e], v[(e + 1) % M]
        if q == a:
            return (e, 0.0)
        dd = point_segment_distance(q, a, b)
        if dd <= tol and (best is None or dd < best[0]):
            L2 = (b[0] - a[0]) ** 2 + (b[1] - a[1]) ** 2
            t = ((q[0] - a[0]) * (b[0] - a[0]) + (q[1] - a[1]) * (b[1] - a[1])) / L2
            t = min(max(t, 0.0), 1.0)
            if t >= 1.0:
                best = (dd, ((e + 1) % M, 0.0))
            else:
                best = (dd, (e, t))
    return None if best is None else best[1]


def _tol(d: RopeDomain) -> float:
    return 1e-9 * max(1.0, d.polygon.diagonal())


# ---------------------------------------------------------------------------
# building pieces


def _between(lo: float, hi: float):
    """Integer positions strictly inside (lo, hi)."""
    k = math.floor(lo) + 1
    while k < hi:
        yield k
        k += 1


def _build_pieces(d: RopeDomain, segs: Sequence[CuttingSegment]) -> Tuple[Piece, ...]:
    v = d.boundary.vertices
    M = len(v)
    N = len(segs)
    pieces = []
    for i in range(N + 1):
        ring: List[Point] = []
        didx: List[Optional[int]] = []

        def add(p, k=None):
            if ring and ring[-1] == p:
                if k is not None and didx[-1] is None:
                    didx[-1] = k
                return len(ring) - 1
            ring.append(p)
            didx.append(k)
            return len(ring) - 1

        def anchor_index(seg_anchor):
            e, t = seg_anchor
            return e if t == 0.0 else None

        lo_u = lo_v = hi_u = hi_v = start = end = None
        if i == 0:
            start = add(v[0], 0)
            su0 = 0.0
        else:
            s = segs[i - 1]
            lo_u = add(s.u, anchor_index(s.u_anchor))
            su0 = s.u_pos
        su1 = segs[i].u_pos if i < N else float(B_POS)
        for k in _between(su0, su1):
            add(v[k], k)
        if i < N:
            s = segs[i]
            hi_u = add(s.u, anchor_index(s.u_anchor))
            hi_v = add(s.v, anchor_index(s.v_anchor))
            sv1 = s.v_pos
        else:
            end = add(v[B_POS], B_POS)
            sv1 = float(B_POS)
        sv0 = segs[i - 1].v_pos if i > 0 else float(M)
        for k in _between(sv1, sv0):
            add(v[k % M], k % M)
        if i > 0:
            s = segs[i - 1]
            lo_v = add(s.v, anchor_index(s.v_anchor))
        if ring[-1] == ring[0] and len(ring) > 1:
            ring.pop()
            didx.pop()
        pieces.append(Piece(i, SimplePolygon(tuple(ring)), tuple(didx), lo_u, lo_v, hi_u, hi_v, start, end))
    return tuple(pieces)


# ---------------------------------------------------------------------------
# vertical partition


def _chain_y(chain, x, closed=False):
    """(i, j, y) for the chain edge spanning x strictly; chain is a list of
    (polygon index, point) ordered by x (either direction). With ``closed``
    a vertex sitting exactly at x also answers, as (i, i, y)."""
    for (i, a), (j, b) in zip(chain, chain[1:]):
        lo, hi = min(a[0], b[0]), max(a[0], b[0])
        if lo < x < hi:
            t = (x - a[0]) / (b[0] - a[0])
            return i, j, a[1] + t * (b[1] - a[1])
    if closed:
        for i, a in chain:
            if a[0] == x:
                return i, i, a[1]
    raise PartitionError(f"no chain edge spans x={x}", station=x)


def _chains(p: SimplePolygon, split):
    v = p.vertices
    n = len(v)
    lower, upper = [], []
    i = split.left
    while True:
        lower.append((i, v[i]))
        if i == split.right:
            break
        i = (i + 1) % n
    i = split.right
    while True:
        upper.append((i, v[i]))
        if i == split.left:
            break
        i = (i + 1) % n
    return lower, upper


def make_vertical_partition(d: RopeDomain, n_cuts: int) -> Partition:
    """N vertical cuts, equally spaced along the polygon's x-span perimeter.

    Stations run around both sides of the polygon (below the lower chain,
    above the upper chain), skipping the x-shadow of the cut [b, c].
    """
    if n_cuts < 1:
        raise PartitionError("need at least one cut")
    p = d.polygon
    split = is_x_monotone_boundary(p)
    if not split:
        raise NonMonotoneError("polygon boundary is not x-monotone")
    lower, upper = _chains(p, split)
    xs = sorted({q[0] for q in p.vertices})
    xmin, xmax = xs[0], xs[-1]
    W = xmax - xmin
    if W <= 0:
        raise PartitionError("polygon has zero width")
    gaps = [b - a for a, b in zip(xs, xs[1:])]
    h = 0.5 * min(gaps)
    near = 1e-9 * max(1.0, W)

    def tau_of(x, side):
        return x - xmin if side == 0 else W + (xmax - x)

    # excluded arc: the cut's x-shadow on the side it lies on
    b, c = d.b, d.c
    lo, hi = max(min(b[0], c[0]), xmin), min(max(b[0], c[0]), xmax)
    bk = d.b_index
    if bk == split.left:
        tb = 0.0
    elif bk == split.right:
        tb = W
    else:
        tb = tau_of(b[0], 0 if any(i == bk for i, _ in lower) else 1)
    if hi > lo:
        xm = 0.5 * (lo + hi)
        cy = b[1] + (xm - b[0]) / (c[0] - b[0]) * (c[1] - b[1])
        _, _, yu = _chain_y(upper, xm, closed=True) if xmin < xm < xmax else (0, 0, -math.inf)
        side = 1 if cy > yu else 0
        e0, e1 = sorted((tau_of(lo, side), tau_of(hi, side)))
        if bk == split.left and side == 1:
            tb = 2 * W
    else:
        e0 = e1 = tb
    if not (e0 - near <= tb <= e1 + near):
        raise PartitionError(f"cut shadow [{e0}, {e1}] does not contain b at {tb}")
    free = 2 * W - (e1 - e0)

    def side_x(tau):
        tau %= 2 * W
        return (0, xmin + tau) if tau < W else (1, xmax - (tau - W))

    def blocked(side, x):
        if not (xmin < x < xmax):
            return True
        t = tau_of(x, side)
        for s in (t, t + 2 * W, t - 2 * W):
            if e0 - near <= s <= e1 + near:
                return True
        return False

    stations = []
    for k in range(n_cuts):
        tau = e1 + (k + 0.5) * free / n_cuts
        side, x = side_x(tau)
        if any(abs(x - q) <= near for q in xs):
            for cand in (x + h, x - h):
                if not blocked(side, cand) and not any(abs(cand - q) <= near for q in xs):
                    x = cand
                    break
            else:
                raise PartitionError(f"cannot nudge station x={x} off a vertex", station=x)
        if blocked(side, x):
            raise PartitionError(f"station x={x} crosses the cut", station=x)
        stations.append((side, x))

    (rx0, ry0), _, (rx1, ry1), _ = d.rect
    tol = _tol(d)
    segs = []
    for side, x in stations:
        if side == 1:
            i, j, y = _chain_y(upper, x)
            u = (x, ry1)
        else:
            i, j, y = _chain_y(lower, x)
            u = (x, ry0)
        vpt = (x, y)
        # polygon edge i->j is traversed j->i in the domain ring
        pj, pi = d.position_of_polygon_vertex(j), d.position_of_polygon_vertex(i)
        a, bb = d.boundary.vertices[pj], d.boundary.vertices[pi]
        t = (x - a[0]) / (bb[0] - a[0])
        ua = locate_on_boundary(d, u, chain=1, tol=tol)
        if ua is None:
            raise PartitionError(f"station x={x}: rectangle endpoint not found", station=x)
        segs.append((ua, (pj, t), u, vpt, x))
    # order along B1 from b_tilde
    segs.sort(key=lambda s: s[0][0] + s[0][1])
    keys = [s[0][0] + s[0][1] for s in segs]
    if len(set(keys)) != len(keys):
        raise PartitionError("two stations collapsed onto the same chord")
    cuts = tuple(CuttingSegment(k + 1, s[2], s[3], s[0], s[1]) for k, s in enumerate(segs))
    part = Partition(d, cuts, _build_pieces(d, cuts), tuple(s[4] for s in segs))
    return part


# ---------------------------------------------------------------------------
# manual cuts and verification


def partition_from_cuts(d: RopeDomain, cuts: Sequence[Tuple[Point, Point]]) -> Partition:
    """Best-effort partition from user segments (u on B1, v on B2).

    Endpoints are snapped to anchors within a small tolerance; segments are
    ordered along B1. Pieces are only built when every endpoint lies on its
    chain; :func:`verify_partition` reports what is wrong otherwise.
    """
    tol = _tol(d)
    segs = []
    ok = True
    for u, v in cuts:
        u = (float(u[0]), float(u[1]))
        v = (float(v[0]), float(v[1]))
        ua = locate_on_boundary(d, u, chain=1, tol=tol) or locate_on_boundary(d, u, tol=tol)
        va = locate_on_boundary(d, v, chain=2, tol=tol) or locate_on_boundary(d, v, tol=tol)
        if ua is None or va is None or not _on_chain(d, ua, 1) or not _on_chain(d, va, 2):
            ok = False
        segs.append((ua or (-1, 0.0), va or (-1, 0.0), u, v))
    segs.sort(key=lambda s: s[0][0] + s[0][1])
    out = tuple(CuttingSegment(k + 1, s[2], s[3], s[0], s[1]) for k, s in enumerate(segs))
    pieces: Tuple[Piece, ...] = ()
    if ok and _ordered(out):
        try:
            pieces = _build_pieces(d, out)
        except GeometryError:
            pieces = ()
    return Partition(d, out, pieces)


def _on_chain(d: RopeDomain, anchor, chain) -> bool:
    pos = anchor[0] + anchor[1]
    if chain == 1:
        return 0.0 < pos < B_POS
    return B_POS < pos < d.size


def _ordered(segs) -> bool:
    us = [s.u_pos for s in segs]
    vs = [s.v_pos for s in segs]
    return all(a < b for a, b in zip(us, us[1:])) and all(a > b for a, b in zip(vs, vs[1:]))


@dataclass
class PartitionReport:
    conditions: Dict[str, Tuple[bool, str]] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(v[0] for v in self.conditions.values())

    def __getitem__(self, key):
        return self.conditions[key][0]


def _chord_inside(d: RopeDomain, s: CuttingSegment, tol: float) -> Optional[str]:
    ring = d.boundary.vertices
    M = len(ring)
    for e in range(M):
        a, b = ring[e], ring[(e + 1) % M]
        inter = segment_intersection((s.u, s.v), (a, b))
        if not inter:
            continue
        if inter.kind == "point":
            q = inter.point
            if dist(q, s.u) <= tol or dist(q, s.v) <= tol:
                continue
        return f"chord {s.index} meets boundary edge {e}"
    mid = ((s.u[0] + s.v[0]) / 2, (s.u[1] + s.v[1]) / 2)
    if point_in_polygon(mid, ring) != 1:
        return f"chord {s.index} midpoint is not interior"
    return None


def verify_partition(d: RopeDomain, part: Partition) -> PartitionReport:
    from shapely import STRtree
    from shapely.geometry import Polygon

    rep = PartitionReport()
    tol = _tol(d)
    segs = part.segments

    # 1. chords inside, endpoints on their chains
    msgs = []
    for s in segs:
        ua = locate_on_boundary(d, s.u, chain=1, tol=tol)
        va = locate_on_boundary(d, s.v, chain=2, tol=tol)
        if ua is None or not _on_chain(d, ua, 1):
            msgs.append(f"u of chord {s.index} is not on B1")
        if va is None or not _on_chain(d, va, 2):
            msgs.append(f"v of chord {s.index} is not on B2")
        m = _chord_inside(d, s, tol)
        if m:
            msgs.append(m)
    rep.conditions["containment"] = (not msgs, "; ".join(msgs))

    # 2. separation: removing u and v splits the ring with b_tilde and b apart
    msgs = []
    for s in segs:
        ua = locate_on_boundary(d, s.u, tol=tol)
        va = locate_on_boundary(d, s.v, tol=tol)
        if ua is None or va is None:
            msgs.append(f"chord {s.index} endpoints are off the boundary")
            continue
        pu, pv = ua[0] + ua[1], va[0] + va[1]
        lo, hi = sorted((pu, pv))
        b_side = lo < B_POS < hi
        bt_side = lo < 0.0 < hi or lo < d.size < hi
        if not (b_side != bt_side and 0.0 < lo and hi < d.size):
            msgs.append(f"chord {s.index} does not separate b_tilde from b")
    rep.conditions["separation"] = (not msgs, "; ".join(msgs))

    # 3. pairwise disjoint chords
    msgs = []
    for i in range(len(segs)):
        for j in range(i + 1, len(segs)):
            if segment_intersection((segs[i].u, segs[i].v), (segs[j].u, segs[j].v)):
                msgs.append(f"chords {segs[i].index} and {segs[j].index} intersect")
    rep.conditions["disjointness"] = (not msgs, "; ".join(msgs))

    # 4. coverage by area; 5. interiors pairwise disjoint
    pieces = part.subpolygons
    if not pieces:
        rep.conditions["coverage"] = (False, "pieces could not be built")
        rep.conditions["interior_disjointness"] = (False, "pieces could not be built")
        return rep
    area = d.area()
    total = sum(pc.polygon.area() for pc in pieces)
    bad = [pc.index for pc in pieces if pc.polygon.area() <= 0 or not is_simple(pc.polygon.vertices)]
    cov_ok = abs(total - area) <= 1e-9 * abs(area) and not bad
    msg = f"area sum {total!r} vs domain {area!r}"
    if bad:
        msg += f"; pieces {bad} are not simple with positive area"
    rep.conditions["coverage"] = (cov_ok, msg)

    shapes = [Polygon(pc.polygon.vertices) for pc in pieces]
    tree = STRtree(shapes)
    overlaps = []
    for i, sh in enumerate(shapes):
        for j in tree.query(sh):
            j = int(j)
            if j <= i:
                continue
            inter = sh.intersection(shapes[j]).area
            if inter > 1e-9 * area:
                overlaps.append(f"pieces {i} and {j} overlap by {inter:.3g}")
    rep.conditions["interior_disjointness"] = (not overlaps, "; ".join(overlaps))
    return rep
