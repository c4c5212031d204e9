"""Ear-clipping triangulation with triangle adjacency.

Rings may contain geometrically coincident vertices with distinct indices
(the two banks of a slit). Adjacency is purely index based, so triangles on
opposite banks of a slit never become neighbours.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .geometry import Point, GeometryError, orientation, signed_area

_EPS = 8.0 * 2.0 ** -53


class TriangulationError(GeometryError):
    pass


def _enters_corner(pts, nbrs, p, corner, a, c) -> bool:
    """Does an edge of vertex p (coincident with ``corner``) point strictly
    into the triangle angle at ``corner`` spanned towards a and c?"""
    for q in nbrs:
        d = pts[q]
        if d == corner:
            continue
        o1 = orientation(corner, a, d)
        o2 = orientation(corner, d, c)
        if orientation(corner, a, c) > 0:
            if o1 > 0 and o2 > 0:
                return True
        elif o1 < 0 and o2 < 0:
            return True
    return False


def ear_clip(pts: Sequence[Point]) -> List[Tuple[int, int, int]]:
    """Triangulate a counterclockwise (weakly) simple ring by ear clipping.

    Straight-through vertices are dropped first; they lie on a boundary edge
    of whichever triangle ends up owning that edge.
    """
    n = len(pts)
    if n < 3:
        raise TriangulationError("ring needs 3 vertices")
    nxt = [(i + 1) % n for i in range(n)]
    prv = [(i - 1) % n for i in range(n)]
    alive = n

    def unlink(i):
        nonlocal alive
        nxt[prv[i]] = nxt[i]
        prv[nxt[i]] = prv[i]
        alive -= 1

    # drop collinear straight-through vertices
    changed = True
    removed = [False] * n
    while changed and alive > 3:
        changed = False
        for i in range(n):
            if removed[i] or alive <= 3:
                continue
            a, b, c = pts[prv[i]], pts[i], pts[nxt[i]]
            if orientation(a, b, c) == 0 and (a[0] - b[0]) * (c[0] - b[0]) + (a[1] - b[1]) * (c[1] - b[1]) < 0:
                unlink(i)
                removed[i] = True
                changed = True

    # coincident-coordinate groups
    groups: Dict[Point, List[int]] = {}
    for i in range(n):
        if not removed[i]:
            groups.setdefault(pts[i], []).append(i)
    shared = {i for g in groups.values() if len(g) > 1 for i in g}

    arr = np.asarray(pts, dtype=float)

    def convex(i):
        return orientation(pts[prv[i]], pts[i], pts[nxt[i]]) > 0

    # vertices that can block an ear: non-convex ones and coincident ones
    blockers = {i for i in range(n) if not removed[i] and (not convex(i) or i in shared)}

    def is_ear(i) -> bool:
        ia, ib, ic = prv[i], i, nxt[i]
        A, B, C = pts[ia], pts[ib], pts[ic]
        if orientation(A, B, C) <= 0:
            return False
        cand = [k for k in blockers if k != ia and k != ib and k != ic]
        if not cand:
            return True
        idx = np.fromiter(cand, dtype=np.int64, count=len(cand))
        P = arr[idx]
        # float prefilter with a safe band; survivors are decided exactly
        def ori(u, v):
            l = (v[0] - u[0]) * (P[:, 1] - u[1])
            r = (v[1] - u[1]) * (P[:, 0] - u[0])
            return l - r, _EPS * (np.abs(l) + np.abs(r)) + 1e-300
        d1, b1 = ori(A, B)
        d2, b2 = ori(B, C)
        d3, b3 = ori(C, A)
        maybe = (d1 >= -b1) & (d2 >= -b2) & (d3 >= -b3)
        for k in idx[maybe]:
            k = int(k)
            Pk = pts[k]
            if Pk == A or Pk == B or Pk == C:
                if Pk == A:
                    hit = _enters_corner(pts, (prv[k], nxt[k]), k, A, B, C)
                elif Pk == B:
                    hit = _enters_corner(pts, (prv[k], nxt[k]), k, B, C, A)
                else:
                    hit = _enters_corner(pts, (prv[k], nxt[k]), k, C, A, B)
                if hit:
                    return False
                continue
            if orientation(A, B, Pk) >= 0 and orientation(B, C, Pk) >= 0 and orientation(C, A, Pk) >= 0:
                return False
        return True

    tris: List[Tuple[int, int, int]] = []
    start = next(i for i in range(n) if not removed[i])
    i = start
    stall = 0
    while alive > 3:
        if is_ear(i):
            a, c = prv[i], nxt[i]
            tris.append((a, i, c))
            unlink(i)
            removed[i] = True
            blockers.discard(i)
            for k in (a, c):
                if k in blockers and k not in shared and convex(k):
                    blockers.discard(k)
            i = a
            stall = 0
            continue
        i = nxt[i]
        stall += 1
        if stall > 2 * alive + 2:
            raise TriangulationError(f"no ear found with {alive} vertices left")
    a = i
    b = nxt[a]
    c = nxt[b]
    if orientation(pts[a], pts[b], pts[c]) > 0:
        tris.append((a, b, c))
    elif orientation(pts[a], pts[b], pts[c]) < 0:
        raise TriangulationError("final triangle is clockwise")
    return tris


@dataclass(eq=False)
class Mesh:
    """Triangles over a point list with edge adjacency.

    ``neighbors[t][e]`` is the triangle across edge ``(tri[e], tri[e+1])``.
    """

    points: List[Point]
    triangles: List[Tuple[int, int, int]]
    neighbors: List[List[int]] = field(default_factory=list)
    vertex_tris: Dict[int, List[int]] = field(default_factory=dict)

    def __post_init__(self):
        edge_owner: Dict[Tuple[int, int], Tuple[int, int]] = {}
        self.neighbors = [[-1, -1, -1] for _ in self.triangles]
        self.vertex_tris = {}
        for t, tri in enumerate(self.triangles):
            for e in range(3):
                u, v = tri[e], tri[(e + 1) % 3]
                self.vertex_tris.setdefault(u, []).append(t)
                key = (v, u)
                if key in edge_owner:
                    t2, e2 = edge_owner.pop(key)
                    self.neighbors[t][e] = t2
                    self.neighbors[t2][e2] = t
                else:
                    edge_owner[(u, v)] = (t, e)
        self._arr = np.asarray([[self.points[i] for i in tri] for tri in self.triangles], dtype=float).reshape(-1, 3, 2)
        self._root_tree()

    def _root_tree(self):
        m = len(self.triangles)
        self.parent = [-1] * m
        self.depth = [-1] * m
        for root in range(m):
            if self.depth[root] >= 0:
                continue
            self.depth[root] = 0
            stack = [root]
            while stack:
                t = stack.pop()
                for nb in self.neighbors[t]:
                    if nb >= 0 and self.depth[nb] < 0:
                        self.depth[nb] = self.depth[t] + 1
                        self.parent[nb] = t
                        stack.append(nb)

    def area(self) -> float:
        return sum(signed_area([self.points[i] for i in tri]) for tri in self.triangles)

    def dual_path(self, a: int, b: int) -> List[int]:
        left, right = [a], [b]
        x, y = a, b
        while self.depth[x] > self.depth[y]:
            x = self.parent[x]
            left.append(x)
        while self.depth[y] > self.depth[x]:
            y = self.parent[y]
            right.append(y)
        while x != y:
            x = self.parent[x]
            y = self.parent[y]
            if x < 0 or y < 0:
                raise TriangulationError("triangles are not connected")
            left.append(x)
            right.append(y)
        right.pop()
        return left + right[::-1]

    def contains(self, t: int, p: Point) -> bool:
        a, b, c = (self.points[i] for i in self.triangles[t])
        return orientation(a, b, p) >= 0 and orientation(b, c, p) >= 0 and orientation(c, a, p) >= 0

    def locate(self, p: Point) -> List[int]:
        """Triangles whose closed region contains p.

        A point a rounding error outside the mesh (e.g. a constructed point
        on a boundary edge) is assigned to the nearest triangle.
        """
        T = self._arr
        px, py = p
        ab = (T[:, 1, 0] - T[:, 0, 0]) * (py - T[:, 0, 1]) - (T[:, 1, 1] - T[:, 0, 1]) * (px - T[:, 0, 0])
        bc = (T[:, 2, 0] - T[:, 1, 0]) * (py - T[:, 1, 1]) - (T[:, 2, 1] - T[:, 1, 1]) * (px - T[:, 1, 0])
        ca = (T[:, 0, 0] - T[:, 2, 0]) * (py - T[:, 2, 1]) - (T[:, 0, 1] - T[:, 2, 1]) * (px - T[:, 2, 0])
        scale = np.abs(T).max(axis=(1, 2)) + abs(px) + abs(py)
        band = 1e-12 * scale * scale
        worst = np.minimum(np.minimum(ab, bc), ca)
        cand = np.nonzero(worst >= -band)[0]
        hits = [int(t) for t in cand if self.contains(int(t), p)]
        if hits:
            return sorted(hits)
        # nearest by normalised worst signed distance
        return [int(np.argmax(worst / (scale * scale)))]

    def fan(self, v: int) -> List[int]:
        return sorted(self.vertex_tris.get(v, []))

    def shared_edge(self, t: int, u: int) -> Tuple[int, int]:
        """(left, right) vertex indices of the portal from t into u."""
        e = self.neighbors[t].index(u)
        tri = self.triangles[t]
        return tri[(e + 1) % 3], tri[e]


def triangulate(p) -> Mesh:
    """Triangulate a polygon (anything with ``vertices``) into a :class:`Mesh`.

    Cached on the polygon object.
    """
    cache = getattr(p, "_cache", None)
    if cache is not None and "mesh" in cache:
        return cache["mesh"]
    pts = list(p.vertices)
    mesh = Mesh(pts, ear_clip(pts))
    if cache is not None:
        cache["mesh"] = mesh
    return mesh


def glue(m1: Mesh, m2: Mesh, pairs: Sequence[Tuple[int, int]]) -> Tuple[Mesh, List[int]]:
    """Union of two meshes sharing edges; ``pairs`` maps m2 vertex -> m1 vertex.

    Returns the glued mesh and the index map for m2's vertices.
    """
    remap = {j: i for j, i in pairs}
    pts = list(m1.points)
    index2 = []
    for j, p in enumerate(m2.points):
        if j in remap:
            index2.append(remap[j])
        else:
            index2.append(len(pts))
            pts.append(p)
    tris = list(m1.triangles) + [tuple(index2[k] for k in tri) for tri in m2.triangles]
    return Mesh(pts, tris), index2
