import math
import random

import pytest

from convexrope.domain import (
    B_POS,
    DomainError,
    bounding_rectangle,
    build_domain,
    sp_avoids_b1,
)
from convexrope.fixtures import generate_fixture
from convexrope.geometry import hausdorff_distance, orientation, point_segment_distance, signed_area
from convexrope.polygon import (
    NotVisibleFromInfinity,
    VisibilityCertificate,
    hull_indices,
    point_in_polygon,
    validate,
    visibility_from_infinity,
)

from conftest import SQUARE, oracle_rope, star_polygon


def test_bounding_rectangle_unit_square():
    r = bounding_rectangle(validate(SQUARE), 0.1)
    pad = 0.1 * math.sqrt(2)
    assert r[0] == pytest.approx((-pad, -pad))
    assert r[2] == pytest.approx((1 + pad, 1 + pad))


def test_bounding_rectangle_thin_polygon_has_clearance():
    p = validate([(0, 0), (1000, 0), (1000, 0.001), (0, 0.001)])
    (x0, y0), _, (x1, y1), _ = bounding_rectangle(p, 0.25)
    assert y0 < -200 and y1 > 200 and x0 < -200 and x1 > 1200


def test_bounding_rectangle_rejects_bad_margin():
    with pytest.raises(DomainError):
        bounding_rectangle(validate(SQUARE), 0.0)


def test_bounding_rectangle_clear_of_random_polygon():
    p = star_polygon(random.Random(7), 100)
    rect = bounding_rectangle(p, 0.25)
    sides = list(zip(rect, rect[1:] + rect[:1]))
    gap = min(point_segment_distance(v, a, b) for v in p.vertices for a, b in sides)
    assert gap > 0
    assert all(point_in_polygon(v, rect) == 1 for v in p.vertices)


def test_unit_square_domain_layout():
    p = validate(SQUARE)
    cert = visibility_from_infinity(p, 2, (1.0, 1.0))
    d = build_domain(p, 2, cert, 0.25)
    v = d.boundary.vertices
    # 4 polygon vertices + 4 rectangle corners + b_tilde, c, c_tilde; b is one of the polygon's
    assert d.size == 11
    assert v[0] == v[B_POS] == (1.0, 1.0)
    assert v[1] == v[6] == d.c
    # the diagonal ray would exit through a corner, so it was re-picked inside the free cone
    assert d.cert.ray_direction != cert.ray_direction
    assert d.c[0] > 1 and d.c[1] < d.rect[2][1]
    assert set(v[2:6]) == set(d.rect)
    # B2 walks the square clockwise from b
    assert v[7:] == ((1.0, 1.0), (1.0, 0.0), (0.0, 0.0), (0.0, 1.0))
    assert d.b1()[0] == d.b_tilde and d.b1()[-1] == d.b
    assert d.b2()[0] == d.b and d.b2()[-1] == d.b_tilde


@pytest.mark.parametrize("family,seed", [("comb", 1), ("monotone", 2), ("convex", 3)])
def test_domain_invariants(family, seed):
    pf = generate_fixture(40, seed, family)
    p = pf.polygon()
    d = build_domain(p, pf.b)
    v = d.boundary.vertices
    M = len(v)
    assert M == p.n + 7
    # chains cover the boundary and share only b and b_tilde
    lo1, hi1 = d.b1_range
    lo2, hi2 = d.b2_range
    assert (lo1, hi1) == (0, B_POS)
    assert lo2 == B_POS
    # B1 vertices other than b, b_tilde are convex
    for i in range(1, B_POS):
        assert orientation(v[i - 1], v[i], v[i + 1]) > 0
    # B2 lists the polygon clockwise
    ring = [v[B_POS + j] for j in range(p.n)]
    assert ring == [p.vertices[(pf.b - j) % p.n] for j in range(p.n)]
    assert signed_area(v) == pytest.approx(d.area(), rel=1e-12)
    # both banks of the slit are interior points of the domain
    mid = ((d.b[0] + d.c[0]) / 2, (d.b[1] + d.c[1]) / 2)
    assert point_in_polygon(mid, p.vertices) == -1
    dx, dy = d.c[0] - d.b[0], d.c[1] - d.b[1]
    L = math.hypot(dx, dy)
    for sgn in (1, -1):
        q = (mid[0] - sgn * 1e-6 * dy / L, mid[1] + sgn * 1e-6 * dx / L)
        assert point_in_polygon(q, v) == 1
    for k in range(p.n):
        assert v[d.position_of_polygon_vertex(k)] == p.vertices[k]


def test_ray_through_polygon_rejected():
    p = validate(SQUARE)
    bad = VisibilityCertificate(2, (-1.0, -0.5), ())
    with pytest.raises(NotVisibleFromInfinity):
        build_domain(p, 2, bad)


def test_certificate_vertex_mismatch():
    p = validate(SQUARE)
    with pytest.raises(DomainError):
        build_domain(p, 1, visibility_from_infinity(p, 2))


def test_sp_avoids_b1_examples():
    p = validate([(0, 0), (4, 0), (5, 3), (2, 5), (-1, 3)])
    b = 3
    d = build_domain(p, b)
    rope = oracle_rope(d)
    assert sp_avoids_b1(rope.path, d)
    # the counterclockwise rope of a convex polygon is its boundary traversed from b_tilde back to b
    assert set(rope.points) == set(p.vertices)
    corner = d.rect[0]
    assert not sp_avoids_b1([d.b_tilde, d.c, corner], d)
    assert not sp_avoids_b1([d.rect[0], d.rect[1]], d)


@pytest.mark.parametrize("seed", range(5))
def test_oracle_rope_independent_of_rectangle(seed):
    pf = generate_fixture(30, seed, ("monotone", "comb", "convex")[seed % 3])
    p = pf.polygon()
    ropes = [oracle_rope(build_domain(p, pf.b, margin_fraction=m)).points for m in (0.1, 0.25, 1.0)]
    for r in ropes[1:]:
        assert len(r) == len(ropes[0])
        assert hausdorff_distance(r, ropes[0]) <= 1e-9


@pytest.mark.parametrize("seed", range(5))
def test_hull_vertex_domains_build(seed):
    p = star_polygon(random.Random(900 + seed), 40)
    for k in hull_indices(p)[:4]:
        d = build_domain(p, k)
        assert sp_avoids_b1(oracle_rope(d).path, d)
