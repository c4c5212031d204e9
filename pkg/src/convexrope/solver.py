"""Method of multiple shooting for the shortest path from b_tilde to b.

Shooting points live on the cutting segments as parameters ``s`` in [0, 1]
(0 at the B2 end v, 1 at the B1 end u). One sweep reads every temporary
point off the current path, computes every candidate update, and only then
commits (Jacobi style).
"""

from __future__ import annotations

import logging
import math
import time
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from .domain import RopeDomain
from .geometry import (
    ANGLE_TOL,
    GeometryError,
    Point,
    Polyline,
    angle_at,
    dist,
    point_segment_distance,
    polyline_length,
    precise_length,
    segment_intersection,
)
from .partition import Partition, make_vertical_partition
from .shortest_path import mesh_geodesic
from .triangulation import Mesh, glue, triangulate

log = logging.getLogger(__name__)

CONVERGED = "converged"
CAPPED = "iteration-capped"


class SolverError(GeometryError):
    pass


@dataclass(frozen=True)
class ShootingState:
    s: Tuple[float, ...]
    points: Tuple[Point, ...]
    j: int = 0

    @property
    def a(self) -> Tuple[Point, ...]:
        return self.points

    @property
    def n_cuts(self) -> int:
        return len(self.s)


@dataclass
class IterationRecord:
    j: int
    length: float
    max_shift: float
    collinear_flags: Tuple[bool, ...]
    gamma: Optional[Polyline] = None
    length_precise: Optional[object] = None
    angles: Tuple[float, ...] = ()
    candidate_s: Tuple[float, ...] = ()
    candidate_shifts: Tuple[float, ...] = ()
    s: Tuple[float, ...] = ()
    elapsed: float = 0.0

    @property
    def violated(self) -> int:
        return sum(1 for f in self.collinear_flags if not f)


@dataclass
class SolverConfig:
    n_cuts: int = 8
    epsilon: float = 1e-6
    max_iterations: int = 10000
    record_history: bool = True
    record_paths: bool = False
    precise_lengths: bool = False
    angle_tol: float = ANGLE_TOL

    def __post_init__(self):
        if not self.epsilon > 0:
            raise ValueError("epsilon must be positive")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be at least 1")
        if self.n_cuts < 1:
            raise ValueError("n_cuts must be at least 1")


@dataclass
class SolveResult:
    path: Polyline
    history: List[IterationRecord]
    status: str
    state: ShootingState
    partition: Partition
    iterations: int
    wall_time: float = 0.0

    @property
    def length(self) -> float:
        return polyline_length(self.path)

    @property
    def converged(self) -> bool:
        return self.status == CONVERGED


# ---------------------------------------------------------------------------
# engine: meshes and caches bound to one partition


Step = Tuple[Point, Optional[int]]


class _Engine:
    def __init__(self, part: Partition):
        self.part = part
        self.N = part.n_cuts
        self.pieces = part.subpolygons
        self.meshes = [triangulate(pc) for pc in self.pieces]
        self.tol = 1e-9 * max(1.0, part.domain.polygon.diagonal())
        self.unions: Dict[int, Tuple[Mesh, List[int]]] = {}
        self.piece_cache: Dict[tuple, List[Step]] = {}
        self.update_cache: Dict[tuple, Tuple[float, Point]] = {}

    def _lo_query(self, i, s):
        pc = self.pieces[i]
        if i == 0:
            return pc.start
        if s == 0.0:
            return pc.lo_v
        return self.part.segments[i - 1].point_at(s)

    def _hi_query(self, i, s):
        pc = self.pieces[i]
        if i == self.N:
            return pc.end
        if s == 0.0:
            return pc.hi_v
        return self.part.segments[i].point_at(s)

    def piece_path(self, i: int, s_lo: float, s_hi: float) -> List[Step]:
        key = (i, s_lo, s_hi)
        hit = self.piece_cache.get(key)
        if hit is None:
            hit = mesh_geodesic(self.meshes[i], self._lo_query(i, s_lo), self._hi_query(i, s_hi), self.tol)
            if len(self.piece_cache) > 8 * (self.N + 1):
                self.piece_cache.clear()
            self.piece_cache[key] = hit
        return hit

    def union(self, i: int) -> Tuple[Mesh, List[int]]:
        """Mesh of D_{i-1} and D_i glued along cut i."""
        if i not in self.unions:
            a, b = self.pieces[i - 1], self.pieces[i]
            self.unions[i] = glue(self.meshes[i - 1], self.meshes[i], [(b.lo_u, a.hi_u), (b.lo_v, a.hi_v)])
        return self.unions[i]

    def update(self, i: int, t_prev: Step, t_next: Step) -> float:
        """Parameter of SP(t_prev, t_next) meeting cut i, in the union mesh."""
        key = (i, t_prev, t_next)
        hit = self.update_cache.get(key)
        if hit is not None:
            return hit
        mesh, index2 = self.union(i)
        qa = t_prev[1] if t_prev[1] is not None else t_prev[0]
        qb = index2[t_next[1]] if t_next[1] is not None else t_next[0]
        path = [p for p, _ in mesh_geodesic(mesh, qa, qb, self.tol)]
        s = crossing_parameter(self.part.segments[i - 1], path)
        if len(self.update_cache) > 8 * (self.N + 1):
            self.update_cache.clear()
        self.update_cache[key] = s
        return s


def _engine(part: Partition) -> _Engine:
    eng = part._cache.get("engine")
    if eng is None:
        eng = _Engine(part)
        part._cache["engine"] = eng
    return eng


def reset_caches(part: Partition) -> None:
    """Forget cached geodesics (meshes are kept). Used for cold-sweep timing."""
    eng = part._cache.get("engine")
    if eng is not None:
        eng.piece_cache.clear()
        eng.update_cache.clear()


def crossing_parameter(seg, path: Sequence[Point], tol: float = 0.0) -> float:
    """Parameter s where a path crosses the cutting segment (0 at v, 1 at u).

    With ``tol`` > 0 a path that only grazes the cut (an end of the cut lies
    on a path edge up to rounding) counts as crossing at the nearest point.
    """
    u, v = seg.u, seg.v
    L2 = (u[0] - v[0]) ** 2 + (u[1] - v[1]) ** 2
    for p, q in zip(path, path[1:]):
        inter = segment_intersection((p, q), (v, u))
        if not inter:
            continue
        x = inter.point if inter.kind == "point" else min(
            (inter.segment.p, inter.segment.q), key=lambda z: dist(z, p)
        )
        s = ((x[0] - v[0]) * (u[0] - v[0]) + (x[1] - v[1]) * (u[1] - v[1])) / L2
        s = min(max(s, 0.0), 1.0)
        if s >= 1.0:
            raise SolverError(f"update reached the B1 end of cut {seg.index}")
        return s
    if tol > 0.0:
        near = [(point_segment_distance(x, v, u), x) for x in path]
        near += [(point_segment_distance(e, p, q), e) for p, q in zip(path, path[1:]) for e in (v, u)]
        dd, x = min(near, key=lambda t: t[0])
        if dd <= tol:
            s = ((x[0] - v[0]) * (u[0] - v[0]) + (x[1] - v[1]) * (u[1] - v[1])) / L2
            return min(max(s, 0.0), 1.0)
    raise SolverError(f"geodesic between temporary points misses cut {seg.index}")


# ---------------------------------------------------------------------------
# public operations


def _points(part: Partition, s: Sequence[float]) -> Tuple[Point, ...]:
    d = part.domain
    return (d.b_tilde,) + tuple(seg.point_at(si) for seg, si in zip(part.segments, s)) + (d.b,)


def initial_state(part: Partition) -> ShootingState:
    s = tuple(0.0 for _ in part.segments)
    return ShootingState(s, _points(part, s), 0)


def piece_paths(part: Partition, state: ShootingState) -> List[List[Step]]:
    eng = _engine(part)
    s = (0.0,) + state.s + (0.0,)
    return [eng.piece_path(i, s[i], s[i + 1]) for i in range(part.n_cuts + 1)]


def path_of(part: Partition, state: ShootingState, paths=None) -> Polyline:
    """The path formed by the shooting points (piece geodesics joined)."""
    if paths is None:
        paths = piece_paths(part, state)
    pts: List[Point] = []
    for seq in paths:
        for p, _ in seq:
            if not pts or pts[-1] != p:
                pts.append(p)
    return Polyline(tuple(pts))


def upper_angle_at(part: Partition, state: ShootingState, i: int, paths=None) -> float:
    if paths is None:
        paths = piece_paths(part, state)
    before, after = paths[i - 1], paths[i]
    if len(before) < 2 or len(after) < 2:
        raise SolverError(f"zero-length piece next to cut {i}")
    return angle_at(before[-2][0], state.points[i], after[1][0], part.segments[i - 1].u)


def collinear_condition_holds(angle: float, at_v: bool, tol: float = ANGLE_TOL) -> bool:
    if at_v:
        return angle >= math.pi - tol
    return abs(angle - math.pi) <= tol


def temporary_point(seq: Sequence[Step]) -> Step:
    if len(seq) == 2:
        (p, _), (q, _) = seq
        return ((0.5 * (p[0] + q[0]), 0.5 * (p[1] + q[1])), None)
    return seq[1]


def pick_temporary_points(part: Partition, state: ShootingState, paths=None) -> List[Step]:
    if paths is None:
        paths = piece_paths(part, state)
    return [temporary_point(seq) for seq in paths]


def update_shooting_point(d: RopeDomain, part: Partition, t_prev, t_next, i: int) -> Point:
    """a_i^next for cut i from two temporary points (points or (point, index))."""
    eng = _engine(part)

    def as_step(t):
        if isinstance(t, tuple) and len(t) == 2 and isinstance(t[0], tuple):
            return t
        return ((float(t[0]), float(t[1])), None)

    s = eng.update(i, as_step(t_prev), as_step(t_next))
    return part.segments[i - 1].point_at(s)


def collinear_update(d: RopeDomain, part: Partition, state: ShootingState, config: Optional[SolverConfig] = None):
    """One Jacobi sweep. Returns (new state, all_collinear, record)."""
    cfg = config or SolverConfig(n_cuts=part.n_cuts)
    eng = _engine(part)
    paths = piece_paths(part, state)
    temps = [temporary_point(seq) for seq in paths]
    N = part.n_cuts
    flags, angles, cand, shifts, new_s = [], [], [], [], []
    for i in range(1, N + 1):
        si = state.s[i - 1]
        ang = upper_angle_at(part, state, i, paths)
        holds = collinear_condition_holds(ang, si == 0.0, cfg.angle_tol)
        s_hat = eng.update(i, temps[i - 1], temps[i])
        a_hat = part.segments[i - 1].point_at(s_hat)
        flags.append(holds)
        angles.append(ang)
        cand.append(s_hat)
        shifts.append(dist(a_hat, state.points[i]))
        new_s.append(si if holds else s_hat)
    new_s_t = tuple(new_s)
    new_state = ShootingState(new_s_t, _points(part, new_s_t), state.j + 1)
    committed = [0.0 if f else sh for f, sh in zip(flags, shifts)]
    gamma = path_of(part, state, paths)
    rec = IterationRecord(
        j=state.j,
        length=polyline_length(gamma),
        max_shift=max(committed) if committed else 0.0,
        collinear_flags=tuple(flags),
        gamma=gamma if cfg.record_paths else None,
        length_precise=precise_length(gamma) if cfg.precise_lengths else None,
        angles=tuple(angles),
        candidate_s=tuple(cand),
        candidate_shifts=tuple(shifts),
        s=state.s,
    )
    return new_state, all(flags), rec


def solve(
    d: RopeDomain,
    config: Optional[SolverConfig] = None,
    partition: Optional[Partition] = None,
    on_iteration=None,
) -> SolveResult:
    """Iterate sweeps until the largest committed shift drops below epsilon."""
    cfg = config or SolverConfig()
    t0 = time.perf_counter()
    part = partition if partition is not None else make_vertical_partition(d, cfg.n_cuts)
    state = initial_state(part)
    history: List[IterationRecord] = []
    status = CAPPED
    for _ in range(cfg.max_iterations):
        state, all_ok, rec = collinear_update(d, part, state, cfg)
        rec.elapsed = time.perf_counter() - t0
        if cfg.record_history:
            history.append(rec)
        if on_iteration is not None:
            on_iteration(rec)
        # the angle form is logged next to the shift form
        if all_ok and rec.max_shift >= cfg.epsilon:
            log.debug("sweep %d: angle test holds but shift %.3g >= eps", rec.j, rec.max_shift)
        if rec.max_shift < cfg.epsilon:
            status = CONVERGED
            break
    final = drop_pass_through(path_of(part, state), d)
    return SolveResult(final, history, status, state, part, state.j, time.perf_counter() - t0)


def drop_pass_through(path: Polyline, d: RopeDomain, tol: Optional[float] = None) -> Polyline:
    """Remove path vertices that are not domain vertices and where the path
    runs straight (within ``tol`` of the chord through their neighbours).

    These are shooting points the rope merely passes through; at convergence
    the rope only turns at vertices of the polygon.
    """
    if tol is None:
        tol = 1e-9 * max(1.0, d.polygon.diagonal())
    corners = set(d.boundary.vertices)
    pts = list(path.vertices)
    out = [pts[0]]
    for k in range(1, len(pts) - 1):
        p = pts[k]
        if p not in corners and point_segment_distance(p, out[-1], pts[k + 1]) <= tol:
            continue
        out.append(p)
    if len(pts) > 1:
        out.append(pts[-1])
    return Polyline(tuple(out))


def rope_from(path: Polyline, a: Point) -> Optional[Polyline]:
    """Suffix of the closed rope starting at its last visit to a (or None)."""
    pts = path.vertices
    for k in range(len(pts) - 1, -1, -1):
        if pts[k] == a:
            return Polyline(pts[k:]) if k < len(pts) - 1 else Polyline((a,))
    return None
