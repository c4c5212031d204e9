"""Geodesic shortest paths inside a simple polygon via the funnel method."""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple, Union

from .geometry import GeometryError, Point, Polyline, orientation, point_segment_distance
from .triangulation import Mesh, triangulate


class OutsidePolygonError(GeometryError):
    pass


@dataclass(frozen=True)
class GeodesicPath:
    path: Polyline
    interior_vertex_indices: Tuple[int, ...] = ()

    @property
    def points(self):
        return self.path.vertices

    def length(self) -> float:
        return self.path.length()

    def reversed(self) -> "GeodesicPath":
        return GeodesicPath(Polyline(self.path.vertices[::-1]), self.interior_vertex_indices[::-1])


Query = Union[int, Point]


def _distance_to_triangle(mesh: Mesh, t: int, p: Point) -> float:
    a, b, c = (mesh.points[i] for i in mesh.triangles[t])
    if mesh.contains(t, p):
        return 0.0
    return min(point_segment_distance(p, a, b), point_segment_distance(p, b, c), point_segment_distance(p, c, a))


def resolve(mesh: Mesh, q: Query, tol: float = 0.0) -> Tuple[Point, List[int], Optional[int]]:
    """Point, containing triangles and vertex index (if any) of a query."""
    if isinstance(q, (int,)) and not isinstance(q, bool):
        fan = mesh.fan(q)
        p = mesh.points[q]
        if fan:
            return p, fan, q
        return p, mesh.locate(p), q
    p = (float(q[0]), float(q[1]))
    tris = mesh.locate(p)
    if len(tris) == 1 and not mesh.contains(tris[0], p):
        d = _distance_to_triangle(mesh, tris[0], p)
        if d > tol:
            raise OutsidePolygonError(f"point {p} lies outside the polygon (distance {d:.3g})")
    return p, tris, None


def funnel(pts: Sequence[Point], start: Point, end: Point, portals: Sequence[Tuple[int, int]]):
    """Simple stupid funnel over ``portals`` given as (left, right) indices.

    Returns ``[(point, vertex_index_or_None), ...]`` from start to end.
    """
    n = len(portals)
    Lp = [pts[l] for l, _ in portals] + [end]
    Rp = [pts[r] for _, r in portals] + [end]
    Li = [l for l, _ in portals] + [None]
    Ri = [r for _, r in portals] + [None]

    out = [(start, None)]
    apex = left = right = start
    apex_k = left_k = right_k = -1
    left_id = right_id = None
    i = 0
    while i <= n:
        pl, pr = Lp[i], Rp[i]
        # right side
        if orientation(apex, right, pr) >= 0:
            if apex == right or orientation(apex, left, pr) < 0:
                right, right_k, right_id = pr, i, Ri[i]
            else:
                apex, apex_k = left, left_k
                out.append((left, left_id))
                right, right_k, right_id = apex, apex_k, left_id
                i = apex_k + 1
                continue
        # left side
        if orientation(apex, left, pl) <= 0:
            if apex == left or orientation(apex, right, pl) > 0:
                left, left_k, left_id = pl, i, Li[i]
            else:
                apex, apex_k = right, right_k
                out.append((right, right_id))
                left, left_k, left_id = apex, apex_k, right_id
                i = apex_k + 1
                continue
        i += 1
    if out[-1][0] != end:
        out.append((end, None))
    return out


def _collapse(seq):
    """Drop repeated points and straight-through turns."""
    res = []
    for item in seq:
        if res and res[-1][0] == item[0]:
            if item[1] is not None and res[-1][1] is None and len(res) > 1:
                res[-1] = item
            continue
        res.append(item)
    k = 1
    while k < len(res) - 1:
        a, b, c = res[k - 1][0], res[k][0], res[k + 1][0]
        if orientation(a, b, c) == 0:
            del res[k]
            k = max(1, k - 1)
        else:
            k += 1
    return res


def mesh_geodesic(mesh: Mesh, x: Query, y: Query, tol: float = 0.0):
    """Geodesic between two queries in a mesh; list of (point, index-or-None)."""
    px, tx, ix = resolve(mesh, x, tol)
    py, ty, iy = resolve(mesh, y, tol)
    if px == py and (ix is None or iy is None or ix == iy or set(tx) & set(ty)):
        return [(px, ix)]
    sx, sy = set(tx), set(ty)
    if sx & sy:
        return [(px, ix), (py, iy)]
    tri_path = mesh.dual_path(tx[0], ty[0])
    s = max(k for k, t in enumerate(tri_path) if t in sx)
    e = next(k for k in range(s, len(tri_path)) if tri_path[k] in sy)
    tri_path = tri_path[s:e + 1]
    portals = [mesh.shared_edge(a, b) for a, b in zip(tri_path, tri_path[1:])]
    out = funnel(mesh.points, px, py, portals)
    out[0] = (px, ix)
    out[-1] = (py, iy)
    return _collapse(out)


def _as_geodesic(seq) -> GeodesicPath:
    pts = [p for p, _ in seq]
    idx = tuple(i for _, i in seq[1:-1] if i is not None)
    return GeodesicPath(Polyline(tuple(pts)), idx)


def shortest_path(p, x: Query, y: Query) -> GeodesicPath:
    """Geodesic from x to y inside polygon p.

    x and y are points, or integer vertex indices (needed to tell apart
    coincident vertices on the two banks of a slit).
    """
    mesh = triangulate(p)
    tol = 1e-9 * max(1.0, _diag(mesh))
    return _as_geodesic(mesh_geodesic(mesh, x, y, tol))


def _diag(mesh: Mesh) -> float:
    xs = [q[0] for q in mesh.points]
    ys = [q[1] for q in mesh.points]
    return ((max(xs) - min(xs)) ** 2 + (max(ys) - min(ys)) ** 2) ** 0.5


def first_interior_vertex(g: GeodesicPath, from_start: bool = True) -> Optional[Point]:
    v = g.path.vertices
    if len(v) <= 2:
        return None
    return v[1] if from_start else v[-2]
