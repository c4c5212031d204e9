import math
import random

import pytest
import shapely

from convexrope.geometry import angle_at, dist, orientation, polyline_length, segment_intersection
from convexrope.polygon import point_in_polygon, validate
from convexrope.shortest_path import (
    OutsidePolygonError,
    first_interior_vertex,
    shortest_path,
)
from convexrope.triangulation import ear_clip, triangulate
from convexrope.visibility_graph import vg_shortest_path

from conftest import L_SHAPE, star_polygon

# zigzag corridor: a tooth hanging from the top, then one rising from the bottom
ZIGZAG = [(0, 0), (3.5, 0), (3.5, 3), (4.5, 3), (4.5, 0), (8, 0), (8, 4), (2.5, 4), (2.5, 1), (1.5, 1), (1.5, 4), (0, 4)]


def random_inside(p, rng):
    x0, y0, x1, y1 = p.bbox()
    while True:
        q = (rng.uniform(x0, x1), rng.uniform(y0, y1))
        if point_in_polygon(q, p.vertices) == 1:
            return q


def test_triangulate_triangle_and_convex():
    tri = validate([(0, 0), (1, 0), (0, 1)])
    m = triangulate(tri)
    assert len(m.triangles) == 1
    ngon = validate([(math.cos(2 * math.pi * k / 9), math.sin(2 * math.pi * k / 9)) for k in range(9)])
    m = triangulate(ngon)
    assert len(m.triangles) == 7
    assert m.area() == pytest.approx(ngon.area(), rel=1e-12)


@pytest.mark.parametrize("seed", range(8))
def test_triangulation_tiles_random_polygon(seed):
    p = star_polygon(random.Random(seed), 60)
    m = triangulate(p)
    v = p.vertices
    straight = sum(orientation(v[k - 1], v[k], v[(k + 1) % p.n]) == 0 for k in range(p.n))
    assert len(m.triangles) == p.n - 2 - straight
    assert m.area() == pytest.approx(p.area(), rel=1e-9)
    shp = shapely.Polygon(p.vertices)
    for a, b, c in m.triangles:
        t = shapely.Polygon([m.points[a], m.points[b], m.points[c]])
        assert t.area > 0
        assert shp.buffer(1e-9).contains(t)
    # adjacency is symmetric
    for t, nbs in enumerate(m.neighbors):
        for u in nbs:
            if u >= 0:
                assert t in m.neighbors[u]
    assert triangulate(validate(p.vertices)).triangles == m.triangles


def test_ear_clip_handles_collinear_runs():
    pts = [(0, 0), (1, 0), (2, 0), (3, 0), (3, 1), (0, 1)]
    tris = ear_clip(pts)
    area = sum(abs((pts[b][0] - pts[a][0]) * (pts[c][1] - pts[a][1])
                   - (pts[b][1] - pts[a][1]) * (pts[c][0] - pts[a][0])) / 2 for a, b, c in tris)
    assert area == pytest.approx(3.0)


def test_convex_polygon_gives_segment():
    p = validate([(0, 0), (5, 0), (6, 3), (2, 5), (-1, 2)])
    g = shortest_path(p, (0.5, 0.5), (3, 4))
    assert g.points == ((0.5, 0.5), (3.0, 4.0))
    assert first_interior_vertex(g) is None
    assert vg_shortest_path(p, (0.5, 0.5), (3, 4)).points == g.points


def test_same_point():
    p = validate(L_SHAPE)
    g = shortest_path(p, (0.5, 0.5), (0.5, 0.5))
    assert g.length() == 0
    assert len(g.points) == 1


def test_l_shape():
    p = validate(L_SHAPE)
    x, y = (3.5, 0.5), (0.5, 3.5)
    g = shortest_path(p, x, y)
    assert g.points == (x, (1.0, 1.0), y)
    assert g.length() == pytest.approx(dist(x, (1, 1)) + dist((1, 1), y), rel=1e-15)
    assert vg_shortest_path(p, x, y).points == g.points
    assert first_interior_vertex(g, True) == (1.0, 1.0)
    assert first_interior_vertex(g, False) == (1.0, 1.0)
    assert g.interior_vertex_indices == (3,)


def test_three_turn_sleeve():
    p = validate(ZIGZAG)
    x, y = (0.5, 3.5), (4.0, 3.5)
    g = shortest_path(p, x, y)
    o = vg_shortest_path(p, x, y)
    assert g.points == o.points
    turns = g.points[1:-1]
    assert turns == ((1.5, 1.0), (2.5, 1.0), (3.5, 3.0))
    assert first_interior_vertex(g, True) == turns[0]
    assert first_interior_vertex(g, False) == turns[-1]
    for k in g.interior_vertex_indices:
        assert p.is_reflex(k)


def test_outside_point_rejected():
    p = validate(L_SHAPE)
    with pytest.raises(OutsidePolygonError):
        shortest_path(p, (3, 3), (0.5, 0.5))


@pytest.mark.parametrize("seed", range(20))
def test_funnel_matches_visibility_graph(seed):
    rng = random.Random(seed)
    p = star_polygon(rng, rng.randint(8, 40))
    x, y = random_inside(p, rng), random_inside(p, rng)
    g, o = shortest_path(p, x, y), vg_shortest_path(p, x, y)
    assert g.length() == pytest.approx(o.length(), rel=1e-9)
    assert g.points == o.points
    for k in g.interior_vertex_indices:
        assert p.is_reflex(k)
    # the whole path stays in the closed polygon
    shp = shapely.Polygon(p.vertices).buffer(1e-9)
    assert shp.covers(shapely.LineString(g.points)) if len(g.points) > 1 else True


@pytest.mark.parametrize("seed", range(10))
def test_symmetry(seed):
    rng = random.Random(50 + seed)
    p = star_polygon(rng, 30)
    x, y = random_inside(p, rng), random_inside(p, rng)
    a = shortest_path(p, x, y)
    b = shortest_path(p, y, x)
    assert len(a.points) == len(b.points)
    for u, v in zip(a.points, reversed(b.points)):
        assert dist(u, v) <= 1e-12
    assert a.reversed().points == tuple(reversed(a.points))


@pytest.mark.parametrize("seed", range(10))
def test_nonoverlap_from_common_source(seed):
    rng = random.Random(80 + seed)
    p = star_polygon(rng, 30)
    s = random_inside(p, rng)
    e1 = shortest_path(p, s, random_inside(p, rng)).points
    e2 = shortest_path(p, s, random_inside(p, rng)).points
    for a, b in zip(e1, e1[1:]):
        for c, d in zip(e2, e2[1:]):
            r = segment_intersection((a, b), (c, d))
            if r.kind == "overlap":
                assert {a, b} == {c, d}


@pytest.mark.parametrize("seed", range(5))
def test_optimal_against_perturbations(seed):
    rng = random.Random(120 + seed)
    p = star_polygon(rng, 25)
    x, y = random_inside(p, rng), random_inside(p, rng)
    g = shortest_path(p, x, y)
    shp = shapely.Polygon(p.vertices).buffer(1e-9)
    L = g.length()
    base = list(g.points)
    if len(base) == 2:
        base = [base[0], ((base[0][0] + base[1][0]) / 2, (base[0][1] + base[1][1]) / 2), base[1]]
    tried = 0
    for _ in range(1000):
        q = [base[0]]
        for v in base[1:-1]:
            r = rng.uniform(0, 2.0)
            t = rng.uniform(0, 2 * math.pi)
            q.append((v[0] + r * math.cos(t), v[1] + r * math.sin(t)))
        q.append(base[-1])
        if not shp.covers(shapely.LineString(q)):
            continue
        tried += 1
        assert polyline_length(q) >= L - 1e-9
    assert tried > 0


@pytest.mark.parametrize("seed", range(10))
def test_geodesic_crosses_chords_straight(seed):
    rng = random.Random(200 + seed)
    p = star_polygon(rng, 30)
    m = triangulate(p)
    x, y = random_inside(p, rng), random_inside(p, rng)
    pts = shortest_path(p, x, y).points
    boundary = {(min(i, j), max(i, j)) for i, j in ((k, (k + 1) % p.n) for k in range(p.n))}
    diagonals = set()
    for tri in m.triangles:
        for e in range(3):
            i, j = tri[e], tri[(e + 1) % 3]
            if (min(i, j), max(i, j)) not in boundary:
                diagonals.add((min(i, j), max(i, j)))
    for i, j in diagonals:
        u, v = m.points[i], m.points[j]
        for k, (a, b) in enumerate(zip(pts, pts[1:])):
            r = segment_intersection((a, b), (u, v))
            if r.kind != "point" or r.point in (a, b, u, v):
                continue
            ang = angle_at(a, r.point, b, u)
            assert ang == pytest.approx(math.pi, abs=1e-9)
