"""Polygon files and deterministic random fixtures.

File format::

    rope-polygon v1
    b 12
    a 3            (optional)
    ray 0.0 1.0    (optional)
    x y            (one vertex per line, counterclockwise)
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional, Tuple

import numpy as np

from .geometry import Point
from .polygon import InvalidPolygonError, SimplePolygon, validate

HEADER = "rope-polygon v1"
FAMILIES = ("monotone", "comb", "convex")


class PolygonFileError(InvalidPolygonError):
    pass


@dataclass(frozen=True)
class PolygonFile:
    vertices: Tuple[Point, ...]
    b: Optional[int] = None
    a: Optional[int] = None
    ray: Optional[Tuple[float, float]] = None

    def polygon(self) -> SimplePolygon:
        return validate(self.vertices)

    def digest(self) -> str:
        return hashlib.sha256(dumps(self).encode()).hexdigest()


def _num(x: float) -> str:
    if float(x).is_integer() and abs(x) < 1e15:
        return str(int(x))
    return repr(float(x))


def dumps(pf: PolygonFile) -> str:
    lines = [HEADER]
    if pf.b is not None:
        lines.append(f"b {pf.b}")
    if pf.a is not None:
        lines.append(f"a {pf.a}")
    if pf.ray is not None:
        lines.append(f"ray {_num(pf.ray[0])} {_num(pf.ray[1])}")
    lines.extend(f"{_num(x)} {_num(y)}" for x, y in pf.vertices)
    return "\n".join(lines) + "\n"


def loads(text: str) -> PolygonFile:
    rows = [ln.split("#", 1)[0].strip() for ln in text.splitlines()]
    rows = [r for r in rows if r]
    if not rows or rows[0] != HEADER:
        raise PolygonFileError(f"missing header line {HEADER!r}")
    b = a = ray = None
    verts: List[Point] = []
    for lineno, r in enumerate(rows[1:], start=2):
        parts = r.split()
        try:
            if parts[0] == "b" and len(parts) == 2:
                b = int(parts[1])
            elif parts[0] == "a" and len(parts) == 2:
                a = int(parts[1])
            elif parts[0] == "ray" and len(parts) == 3:
                ray = (float(parts[1]), float(parts[2]))
            elif len(parts) == 2:
                x, y = float(parts[0]), float(parts[1])
                if not (math.isfinite(x) and math.isfinite(y)):
                    raise ValueError("non-finite coordinate")
                verts.append((x, y))
            else:
                raise ValueError(f"unrecognised line {r!r}")
        except ValueError as exc:
            raise PolygonFileError(f"line {lineno}: {exc}") from None
    n = len(verts)
    for name, idx in (("b", b), ("a", a)):
        if idx is not None and not (0 <= idx < n):
            raise PolygonFileError(f"{name} index {idx} out of range for {n} vertices")
    return PolygonFile(tuple(verts), b, a, ray)


def read(path) -> PolygonFile:
    return loads(Path(path).read_text())


def write(pf: PolygonFile, path) -> None:
    Path(path).write_text(dumps(pf))


# ---------------------------------------------------------------------------
# generators


def _distinct_ints(rng, lo, hi, k):
    """k sorted distinct integers in the open interval (lo, hi)."""
    return np.sort(rng.choice(np.arange(lo + 1, hi), size=k, replace=False)).tolist()


def _convex(n, rng):
    X = max(4 * n, 16)
    k_low = (n - 2) - (n - 2) // 2
    k_up = (n - 2) // 2
    xl = _distinct_ints(rng, -X, X, k_low)
    xu = _distinct_ints(rng, -X, X, k_up)
    shear = int(rng.integers(-2, 3))
    lower = [(-X, X * X)] + [(x, x * x) for x in xl] + [(X, X * X)]
    upper = [(x, 2 * X * X - x * x) for x in reversed(xu)]
    pts = lower + upper
    return [(x, y + shear * x) for x, y in pts]


def _monotone(n, rng):
    X = max(4 * n, 40)
    H = X // 2
    k_low = (n - 2) // 2
    k_up = n - 2 - k_low
    xl = _distinct_ints(rng, -X, X, k_low)
    xu = _distinct_ints(rng, -X, X, k_up)

    def env(x):
        return H * math.sqrt(max(0.0, 1.0 - (x / X) ** 2))

    lower = [(x, -max(1, int(round(env(x) * rng.uniform(0.15, 1.0))))) for x in xl]
    upper = [(x, max(1, int(round(env(x) * rng.uniform(0.15, 1.0))))) for x in reversed(xu)]
    return [(-X, 0)] + lower + [(X, 0)] + upper


def _comb(n, rng):
    # slanted teeth on the upper chain, a shallow random lower chain
    n_teeth = max(1, (n - 4) // 3)
    k_low = n - 2 - 3 * n_teeth
    if k_low < 0:
        raise ValueError("comb needs at least 5 vertices")
    pitch = 12
    X = 6 * n_teeth + 8
    base = 4
    upper = []
    x = X - 4
    for _ in range(n_teeth):
        # valley, rising flank top, descending flank top (x strictly decreasing)
        h = int(rng.integers(20, 80))
        upper.append((x, base))
        upper.append((x - 3, base + h))
        upper.append((x - 5, base + h - int(rng.integers(0, 6))))
        x -= pitch
    xl = _distinct_ints(rng, -X, X, k_low) if k_low else []
    lower = [(xx, -int(rng.integers(1, 10))) for xx in xl]
    # the leftmost part of the upper chain ends above the left endpoint
    pts = [(-X, 0)] + lower + [(X, 0)] + upper
    return pts


def generate_fixture(n_vertices: int, seed: int, family: str = "monotone") -> PolygonFile:
    """Deterministic integer polygon for (n, seed, family).

    b is the topmost vertex (largest y, then largest x), a hull vertex.
    """
    if n_vertices < 3:
        raise ValueError("need at least 3 vertices")
    if family not in FAMILIES:
        raise ValueError(f"unknown family {family!r}; pick one of {FAMILIES}")
    rng = np.random.default_rng([seed, n_vertices, FAMILIES.index(family)])
    if family == "convex":
        pts = _convex(n_vertices, rng)
    elif family == "monotone":
        if n_vertices < 4:
            pts = [(-4, 0), (4, 0), (0, 3)]
        else:
            pts = _monotone(n_vertices, rng)
    else:
        pts = _comb(n_vertices, rng) if n_vertices >= 5 else _monotone(max(n_vertices, 4), rng)
    pts = [(float(x), float(y)) for x, y in pts]
    poly = validate(pts)
    verts = poly.vertices
    b = max(range(len(verts)), key=lambda i: (verts[i][1], verts[i][0]))
    return PolygonFile(verts, b=b)
