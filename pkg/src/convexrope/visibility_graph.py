"""Visibility-graph shortest paths: the slow, independent oracle.

Nodes are the two query points plus every reflex vertex (by index, so the
coincident banks of a slit stay distinct). An edge joins two nodes when the
segment between them stays in the closed polygon. Dijkstra finishes the job.
"""

from __future__ import annotations

import heapq
import math
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .geometry import Point, Polyline, on_segment, orientation, segments_cross_properly
from .polygon import point_in_polygon
from .shortest_path import GeodesicPath, OutsidePolygonError, Query

_EPS = 8.0 * 2.0 ** -53


def _cone_contains(v: Point, prev: Point, nxt: Point, d: Point) -> bool:
    """Is the direction v->d inside the closed interior cone at v?

    The interior lies to the left of the ring, so the cone sweeps CCW from
    the outgoing edge (to nxt) to the incoming one (to prev).
    """
    turn = orientation(prev, v, nxt)
    o1 = orientation(v, nxt, d)
    o2 = orientation(v, d, prev)
    if turn > 0:
        return o1 >= 0 and o2 >= 0
    if turn < 0:
        # reflex: outside only if strictly inside the exterior wedge
        return not (o1 < 0 and o2 < 0)
    dot = (prev[0] - v[0]) * (nxt[0] - v[0]) + (prev[1] - v[1]) * (nxt[1] - v[1])
    if dot < 0:
        return o1 >= 0
    # zero-width spike: only the spike direction itself
    return o1 == 0 and (d[0] - v[0]) * (nxt[0] - v[0]) + (d[1] - v[1]) * (nxt[1] - v[1]) > 0


class _Ring:
    def __init__(self, pts: Sequence[Point]):
        self.pts = list(pts)
        self.n = len(self.pts)
        self.arr = np.asarray(self.pts, dtype=float)
        self.e0 = self.arr
        self.e1 = np.roll(self.arr, -1, axis=0)
        self.by_coord = {}
        for i, p in enumerate(self.pts):
            self.by_coord.setdefault(p, []).append(i)

    def prev(self, i):
        return self.pts[(i - 1) % self.n]

    def next(self, i):
        return self.pts[(i + 1) % self.n]

    def reflex(self, i) -> bool:
        return orientation(self.prev(i), self.pts[i], self.next(i)) < 0

    def in_cone(self, i, d) -> bool:
        return _cone_contains(self.pts[i], self.prev(i), self.next(i), d)


def _point_cone_ok(ring: _Ring, p: Point, d: Point) -> bool:
    """Direction test for a non-vertex query point lying on an edge."""
    for k in range(ring.n):
        a, b = ring.pts[k], ring.next(k)
        if p != a and p != b and orientation(a, b, p) == 0 and on_segment(p, a, b):
            return orientation(a, b, d) >= 0
    return True


def _segment_ok(ring: _Ring, P: Point, Q: Point, exact_edges: Sequence[int], on_open: Sequence[int]) -> bool:
    for k in exact_edges:
        if segments_cross_properly(P, Q, ring.pts[k], ring.next(k)):
            return False
    for w in on_open:
        W = ring.pts[w]
        if not (W != P and W != Q and on_segment(W, P, Q)):
            continue
        if not any(ring.in_cone(k, P) and ring.in_cone(k, Q) for k in ring.by_coord[W]):
            return False
    return True


def _candidates(ring: _Ring, P: Point, Qs: np.ndarray):
    """Float screening of segments P->Q against all edges.

    Returns (certainly_blocked, doubtful_edges, doubtful_vertices) where the
    last two are per-target index arrays needing exact treatment.
    """
    e0, e1 = ring.e0, ring.e1
    px, py = P
    qx = Qs[:, 0:1]
    qy = Qs[:, 1:2]
    dx = qx - px
    dy = qy - py
    # side of edge endpoints w.r.t. line P->Q
    l0 = dx * (e0[None, :, 1] - py)
    r0 = dy * (e0[None, :, 0] - px)
    s0 = l0 - r0
    b0 = _EPS * (np.abs(l0) + np.abs(r0)) + 1e-300
    l1 = dx * (e1[None, :, 1] - py)
    r1 = dy * (e1[None, :, 0] - px)
    s1 = l1 - r1
    b1 = _EPS * (np.abs(l1) + np.abs(r1)) + 1e-300
    # side of P and Q w.r.t. edge lines
    ex = (e1[:, 0] - e0[:, 0])[None, :]
    ey = (e1[:, 1] - e0[:, 1])[None, :]
    lp = ex * (py - e0[None, :, 1])
    rp = ey * (px - e0[None, :, 0])
    sp = lp - rp
    bp = _EPS * (np.abs(lp) + np.abs(rp)) + 1e-300
    lq = ex * (qy - e0[None, :, 1])
    rq = ey * (qx - e0[None, :, 0])
    sq = lq - rq
    bq = _EPS * (np.abs(lq) + np.abs(rq)) + 1e-300

    pos0, neg0 = s0 > b0, s0 < -b0
    pos1, neg1 = s1 > b1, s1 < -b1
    posp, negp = sp > bp, sp < -bp
    posq, negq = sq > bq, sq < -bq
    straddle_e = (pos0 & neg1) | (neg0 & pos1)
    straddle_pq = (posp & negq) | (negp & posq)
    blocked = np.any(straddle_e & straddle_pq, axis=1)
    sure_e = (pos0 & pos1) | (neg0 & neg1) | (posp & posq) | (negp & negq)
    doubtful = ~sure_e & ~(straddle_e & straddle_pq)
    # vertices that may sit on the segment
    near0 = ~(pos0 | neg0)
    lo_x = np.minimum(px, qx) - 0.0
    hi_x = np.maximum(px, qx)
    lo_y = np.minimum(py, qy)
    hi_y = np.maximum(py, qy)
    inbox = (e0[None, :, 0] >= lo_x) & (e0[None, :, 0] <= hi_x) & (e0[None, :, 1] >= lo_y) & (e0[None, :, 1] <= hi_y)
    vert = near0 & inbox
    return blocked, doubtful, vert


def _resolve_query(ring: _Ring, q: Query, tol: float):
    if isinstance(q, int) and not isinstance(q, bool):
        return ring.pts[q], q
    p = (float(q[0]), float(q[1]))
    if point_in_polygon(p, ring.pts) < 0:
        # tolerate a point a rounding error off the boundary
        from .geometry import point_segment_distance

        d = min(point_segment_distance(p, ring.pts[k], ring.next(k)) for k in range(ring.n))
        if d > tol:
            raise OutsidePolygonError(f"point {p} lies outside the polygon")
    return p, None


def vg_shortest_path(p, x: Query, y: Query) -> GeodesicPath:
    """Shortest path by Dijkstra over the visibility graph of reflex vertices.

    ``p`` is a polygon object with ``vertices`` (CCW) or a plain point ring.
    """
    pts = list(getattr(p, "vertices", p))
    ring = _Ring(pts)
    xs = [q[0] for q in pts]
    ys = [q[1] for q in pts]
    tol = 1e-9 * max(1.0, math.hypot(max(xs) - min(xs), max(ys) - min(ys)))
    P, ip = _resolve_query(ring, x, tol)
    Q, iq = _resolve_query(ring, y, tol)
    if P == Q and (ip is None or iq is None or ip == iq):
        return GeodesicPath(Polyline((P,)), ())

    # node list: (point, vertex index or None)
    nodes: List[Tuple[Point, Optional[int]]] = [(P, ip), (Q, iq)]
    for i in range(ring.n):
        if i != ip and i != iq and ring.reflex(i):
            nodes.append((ring.pts[i], i))
    m = len(nodes)
    coords = np.asarray([nd[0] for nd in nodes], dtype=float)

    def tangent_ok(a: int, other: Point) -> bool:
        # a turning vertex must see both of its edges on one side of the line
        if a < 2:
            return True
        i = nodes[a][1]
        A = ring.pts[i]
        return orientation(A, other, ring.prev(i)) * orientation(A, other, ring.next(i)) >= 0

    def end_ok(a: int, other: Point) -> bool:
        pt, idx = nodes[a]
        if idx is not None:
            return ring.in_cone(idx, other)
        return _point_cone_ok(ring, pt, other)

    adj: List[List[Tuple[int, float]]] = [[] for _ in range(m)]
    for a in range(m):
        targets = [b for b in range(a + 1, m)]
        if not targets:
            continue
        A = nodes[a][0]
        keep = []
        for b in targets:
            B = nodes[b][0]
            if A == B:
                continue
            if not (tangent_ok(a, B) and tangent_ok(b, A)):
                continue
            if not (end_ok(a, B) and end_ok(b, A)):
                continue
            keep.append(b)
        if not keep:
            continue
        blocked, doubtful, vert = _candidates(ring, A, coords[keep])
        for row, b in enumerate(keep):
            if blocked[row]:
                continue
            B = nodes[b][0]
            if _segment_ok(ring, A, B, np.nonzero(doubtful[row])[0].tolist(), np.nonzero(vert[row])[0].tolist()):
                w = math.hypot(B[0] - A[0], B[1] - A[1])
                adj[a].append((b, w))
                adj[b].append((a, w))

    dist_ = [math.inf] * m
    prev = [-1] * m
    dist_[0] = 0.0
    heap = [(0.0, 0)]
    while heap:
        d, a = heapq.heappop(heap)
        if d > dist_[a]:
            continue
        if a == 1:
            break
        for b, w in adj[a]:
            nd = d + w
            if nd < dist_[b]:
                dist_[b] = nd
                prev[b] = a
                heapq.heappush(heap, (nd, b))
    if math.isinf(dist_[1]):
        raise OutsidePolygonError("target unreachable; polygon or queries invalid")
    chain = [1]
    while chain[-1] != 0:
        chain.append(prev[chain[-1]])
    chain.reverse()
    seq = [nodes[k] for k in chain]
    # drop straight-through turns
    k = 1
    while k < len(seq) - 1:
        if orientation(seq[k - 1][0], seq[k][0], seq[k + 1][0]) == 0:
            del seq[k]
        else:
            k += 1
    pts_out = tuple(s[0] for s in seq)
    idx = tuple(s[1] for s in seq[1:-1] if s[1] is not None)
    return GeodesicPath(Polyline(pts_out), idx)
