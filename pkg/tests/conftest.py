import math
import random

import pytest

from convexrope.domain import build_domain
from convexrope.fixtures import generate_fixture
from convexrope.polygon import InvalidPolygonError, validate
from convexrope.solver import SolverConfig, solve
from convexrope.visibility_graph import vg_shortest_path

SQUARE = [(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)]
L_SHAPE = [(0, 0), (4, 0), (4, 1), (1, 1), (1, 4), (0, 4)]
# U-notch opening upward; vertex 5 = (3, 1) sits at the bottom of the well
U_NOTCH = [(0, 0), (6, 0), (6, 6), (4, 6), (4, 1), (3, 1), (2, 1), (2, 6), (0, 6)]
# square with a spiral channel carved in from the top; vertex 6 is at its dead end
SPIRAL = [(0, 0), (10, 0), (10, 10), (2, 10), (2, 2), (8, 2), (8, 7), (9, 7), (9, 1), (1, 1), (1, 10), (0, 10)]


def star_polygon(rng: random.Random, n: int, integer=True):
    """Random star-shaped polygon around the origin."""
    while True:
        try:
            return _star(rng, n, integer)
        except InvalidPolygonError:
            pass


def _star(rng, n, integer):
    angles = sorted(rng.uniform(0, 2 * math.pi) for _ in range(n))
    pts = []
    for a in angles:
        r = rng.uniform(20, 100)
        x, y = r * math.cos(a), r * math.sin(a)
        pts.append((float(round(x)), float(round(y))) if integer else (x, y))
    return validate(_dedupe(pts))


def _dedupe(pts):
    out = []
    for p in pts:
        if p not in out:
            out.append(p)
    return out


def oracle_rope(d):
    """Whole-domain visibility graph shortest path from b_tilde to b."""
    return vg_shortest_path(d.boundary, 0, 7)


def solved(pf, n_cuts, eps=1e-9, margin=0.25, **kw):
    poly = pf.polygon()
    d = build_domain(poly, pf.b, margin_fraction=margin)
    res = solve(d, SolverConfig(n_cuts=n_cuts, epsilon=eps, **kw))
    return d, res


@pytest.fixture(scope="session")
def comb30():
    return generate_fixture(30, 1, "comb")


@pytest.fixture(scope="session")
def monotone40():
    return generate_fixture(40, 2, "monotone")
