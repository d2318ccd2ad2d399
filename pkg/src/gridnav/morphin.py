"""Simplified Morphin local planner on the grid.

Candidate paths are straight segments fanned around the centre line from the
robot to the potential collision point, all as long as the centre line. A
candidate is scored ``k1*|G| + k2*dL + k3*W`` (``G`` in radians) or infinity
when one of its cells is blocked. Each candidate carries its own sub-target
where it rejoins the global path beyond the obstacle.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

from . import kernels
from .analysis import Box
from .geometry import GlobalPoint, GridCoord

DEFAULT_FAN = (15.0, -15.0, 30.0, -30.0, 45.0, -45.0, 60.0, -60.0, 75.0, -75.0)


class NoFeasiblePath(RuntimeError):
    def __init__(self, msg: str, candidates: Sequence["CandidatePath"] = ()):
        super().__init__(msg)
        self.candidates = list(candidates)


@dataclass(frozen=True)
class Hazard:
    """An observed obstacle box and its estimated velocity (mm/s)."""

    box: Box
    velocity: tuple[float, float] = (0.0, 0.0)


@dataclass(frozen=True)
class CandidatePath:
    angle: float
    cells: tuple[tuple[int, int], ...]
    endpoint: GlobalPoint
    endpoint_cell: GridCoord
    sub_target: Optional[GridCoord]
    g: float
    dl: float
    w: float
    score: float
    blocked_by: str = ""
    # False when no unobstructed rejoin leg exists and the default sub-target is used
    rejoin_clear: bool = True
    # False when a moving hazard will later sweep the endpoint cell
    dwell_safe: bool = True

    @property
    def feasible(self) -> bool:
        return math.isfinite(self.score)


@dataclass(frozen=True)
class MorphinPlan:
    candidates: list
    chosen: CandidatePath
    sub_target: GridCoord
    centerline_length: float


@dataclass(frozen=True)
class PlannerParams:
    r: float = 500.0
    kappa: tuple[float, float, float] = (1.0, 1.3, 0.6)
    fan: tuple[float, ...] = DEFAULT_FAN
    safety_cells: int = 1
    min_length_cells: float = 2.0
    # extra global-path cells added past the obstacle before rejoining
    rejoin_extra_cells: int = 0
    # seconds the robot may have to hold at an endpoint with no clear rejoin
    dwell_horizon: float = 30.0
    # fall back to the mirrored fan when every forward candidate is blocked
    escape: bool = True


def simplified_score(g: float, dl: float, w: float, kappa=(1.0, 1.3, 0.6), blocked: bool = False) -> float:
    if blocked:
        return math.inf
    k1, k2, k3 = kappa
    return k1 * abs(g) + k2 * dl + k3 * w


def score_full_arc(L: float, G: float, dL: float, W: float, eps=(1.0, 1.0, 1.3, 0.6), blocked: bool = False) -> float:
    """Full-arc evaluation ``e1*L + e2*G + e3*dL + e4*W``; infinite when blocked."""
    if blocked:
        return math.inf
    e1, e2, e3, e4 = eps
    return e1 * L + e2 * G + e3 * dL + e4 * W


def rejoin_weight(m: int) -> float:
    return 1.0 / (1.0 + m)


@dataclass
class SpaceTime:
    """Conservative occupancy test for hazards moving at constant velocity.

    Each hazard box is grown by ``safety_cells``, except when the robot's own
    cell already lies in the grown box: then the raw box is used so the robot
    can still move away. ``static_cells`` are remembered obstacle cells that
    are no longer in view; they are grown the same way.
    """

    hazards: Sequence[Hazard]
    r: float
    safety_cells: int
    time_margin: float
    robot_cell: tuple[int, int]
    blocked_cells: frozenset = field(default_factory=frozenset)
    static_cells: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        rx, ry = self.robot_cell
        k = self.safety_cells
        self.boxes = []
        for h in self.hazards:
            b = h.box.inflate(k)
            if b.contains(rx, ry):
                b = h.box
            self.boxes.append((b, h.velocity))
        grown = set(self.blocked_cells)
        for gx, gy in self.static_cells:
            if max(abs(gx - rx), abs(gy - ry)) <= k:
                grown.add((gx, gy))
            else:
                grown.update((gx + i, gy + j) for i in range(-k, k + 1) for j in range(-k, k + 1))
        self.fixed = frozenset(grown)

    def blocked(self, gx: int, gy: int, t: float) -> bool:
        return self.blocked_during(gx, gy, t - self.time_margin, t + self.time_margin)

    def blocked_during(self, gx: int, gy: int, t0: float, t1: float) -> bool:
        """Whether any swept hazard box overlaps the cell during [t0, t1]."""
        if (gx, gy) in self.fixed:
            return True
        t0 = max(t0, 0.0)
        for b, (vx, vy) in self.boxes:
            lo_x = b.x0 - 0.5 + min(vx * t0, vx * t1) / self.r
            hi_x = b.x1 + 0.5 + max(vx * t0, vx * t1) / self.r
            lo_y = b.y0 - 0.5 + min(vy * t0, vy * t1) / self.r
            hi_y = b.y1 + 0.5 + max(vy * t0, vy * t1) / self.r
            if gx + 0.5 > lo_x and gx - 0.5 < hi_x and gy + 0.5 > lo_y and gy - 0.5 < hi_y:
                return True
        return False


def segment_cells(p: GlobalPoint, q: GlobalPoint, r: float):
    return kernels.traverse(p.x / r + 0.5, p.y / r + 0.5, q.x / r + 0.5, q.y / r + 0.5)


def _leg_blocked(cells, ts, length, t_start, speed, st: SpaceTime, bounds, skip_first: bool = True) -> str:
    w, h = bounds
    for k, ((gx, gy), tt) in enumerate(zip(cells, ts)):
        if skip_first and k == 0:
            continue
        if not (0 <= gx < w and 0 <= gy < h):
            return "bounds"
        if st.blocked(int(gx), int(gy), t_start + tt * length / speed):
            return "obstacle"
    return ""


def first_rejoin_index(
    robot: GlobalPoint,
    pcp: GridCoord,
    global_path: Sequence[GridCoord],
    trigger: Optional[Box],
    params: PlannerParams,
) -> int:
    """First global-path index past the robot, the pcp and the triggering
    box, moved on by ``rejoin_extra_cells``."""
    r = params.r
    path_index = {(p.gx, p.gy): i for i, p in enumerate(global_path)}
    marks = [path_index.get((pcp.gx, pcp.gy), -1)]
    if trigger is not None:
        b = trigger.inflate(params.safety_cells)
        marks += [i for (gx, gy), i in path_index.items() if b.contains(gx, gy)]
    rx, ry = robot.x / r, robot.y / r
    marks.append(min(range(len(global_path)), key=lambda i: (global_path[i].gx - rx) ** 2 + (global_path[i].gy - ry) ** 2))
    return min(max(marks) + 1 + params.rejoin_extra_cells, len(global_path) - 1)


def plan(
    robot: GlobalPoint,
    pcp: GridCoord,
    global_path: Sequence[GridCoord],
    target: GridCoord,
    hazards: Sequence[Hazard],
    trigger: Optional[Box],
    speed: float,
    bounds: tuple[int, int],
    params: PlannerParams = PlannerParams(),
    time_margin: float = 0.0,
    static_cells: frozenset = frozenset(),
) -> MorphinPlan:
    """Pick the cheapest unblocked candidate around the robot -> pcp centre line.

    ``global_path`` is the rasterised start->target line; ``trigger`` the box
    of the obstacle that caused the replan. A candidate is blocked when one of
    its cells (after the start cell) leaves the grid, is the pcp, lies next to
    a remembered static cell, or is swept by a hazard box around the time the
    robot would be there. Each candidate
    rejoins the global path at the first cell past the obstacle that its
    endpoint can reach unobstructed, or at the first cell past the obstacle
    when no such cell exists.
    """
    if not params.fan:
        raise ValueError("at least one candidate angle is required")
    r = params.r
    c = GlobalPoint(pcp.gx * r, pcp.gy * r)
    base = math.atan2(c.y - robot.y, c.x - robot.x)
    length = max(math.hypot(c.x - robot.x, c.y - robot.y), params.min_length_cells * r)
    rcell = (math.floor(robot.x / r + 0.5), math.floor(robot.y / r + 0.5))
    st = SpaceTime(hazards, r, params.safety_cells, time_margin, rcell, frozenset({(pcp.gx, pcp.gy)}), static_cells)
    path_set = {(p.gx, p.gy) for p in global_path}
    first = first_rejoin_index(robot, pcp, global_path, trigger, params)
    tgt = GlobalPoint(target.gx * r, target.gy * r)

    cands = [_candidate(g, robot, base, length, st, speed, bounds, first, global_path, path_set, tgt, time_margin, params)
             for g in params.fan]
    if not any(cp.feasible for cp in cands) and params.escape:
        # cornered: try the mirrored fan, pointing away from the obstacle
        back = [g - math.copysign(180.0, g) for g in params.fan]
        cands += [_candidate(g, robot, base, length, st, speed, bounds, first, global_path, path_set, tgt, time_margin, params)
                  for g in back]
    chosen = choose(cands)
    return MorphinPlan(cands, chosen, chosen.sub_target, length)


def _candidate(g_deg, robot, base, length, st, speed, bounds, first, global_path, path_set, tgt, time_margin, params):
    """Score one candidate leaving the robot at ``g_deg`` from the centre line."""
    r = params.r
    a = base + math.radians(g_deg)
    end = GlobalPoint(robot.x + length * math.cos(a), robot.y + length * math.sin(a))
    end_cell = GridCoord(math.floor(end.x / r + 0.5), math.floor(end.y / r + 0.5))
    cells, ts = segment_cells(robot, end, r)
    g = math.radians(g_deg)
    why = _leg_blocked(cells, ts, length, 0.0, speed, st, bounds)
    sub = global_path[first]
    lc, _ = segment_cells(end, GlobalPoint(sub.gx * r, sub.gy * r), r)
    clear = False
    dwell = True
    if not why:
        t_end = length / speed
        for k in range(first, len(global_path)):
            sc = global_path[k]
            sp = GlobalPoint(sc.gx * r, sc.gy * r)
            kc, kt = segment_cells(end, sp, r)
            if not _leg_blocked(kc, kt, max(end.dist(sp), 1e-9), t_end, speed, st, bounds, skip_first=False):
                sub, lc, clear = sc, kc, True
                break
        if not clear:
            ex, ey = end_cell.gx, end_cell.gy
            dwell = not st.blocked_during(ex, ey, t_end - time_margin, t_end + params.dwell_horizon)
    dl = GlobalPoint(sub.gx * r, sub.gy * r).dist(tgt) / r
    m = len({(int(x), int(y)) for x, y in lc} & path_set)
    w = rejoin_weight(m)
    score = simplified_score(g, dl, w, params.kappa, blocked=bool(why))
    cell_t = tuple((int(x), int(y)) for x, y in cells)
    return CandidatePath(g_deg, cell_t, end, end_cell, sub, g, dl, w, score, why, clear, dwell)


def choose(candidates: Sequence[CandidatePath]) -> CandidatePath:
    """Minimum finite score; ties go to the smaller |G|, then the left side.

    Candidates with an unobstructed rejoin leg are preferred, then those whose
    endpoint stays clear while the robot waits there for one.
    """
    feasible = [cp for cp in candidates if cp.feasible]
    if not feasible:
        raise NoFeasiblePath("every candidate path is blocked", candidates)
    pool = (
        [cp for cp in feasible if cp.rejoin_clear]
        or [cp for cp in feasible if cp.dwell_safe]
        or feasible
    )
    return min(pool, key=lambda cp: (cp.score, abs(cp.angle), -cp.angle))


def line_cells(a: GridCoord, b: GridCoord) -> list[GridCoord]:
    """Rasterised straight global path between two cell centres, in travel order."""
    cells, _ = kernels.traverse(a.gx + 0.5, a.gy + 0.5, b.gx + 0.5, b.gy + 0.5)
    out, seen = [], set()
    for x, y in cells:
        key = (int(x), int(y))
        if key not in seen:
            seen.add(key)
            out.append(GridCoord(*key))
    return out

