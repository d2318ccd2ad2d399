"""Heuristic collision prediction over the eight obstacle scenarios.

Scenario letters: a no conflict, b static obstacle on the path, c obstacle
clears the crossing before the robot, d robot clears it first, e both reach
the crossing together, f head-on, g slower leader on the same path, h more
than one simultaneous conflict (assigned when aggregating a tick).
"""
from __future__ import annotations

import enum
import logging
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from . import kernels
from .analysis import Box
from .geometry import GlobalPoint, GridCoord
from .recognition import Observation

log = logging.getLogger(__name__)


class Verdict(str, enum.Enum):
    NO_ACTION = "NoAction"
    SLOW_DOWN = "SlowDown"
    STOP_AND_WAIT = "StopAndWait"
    REPLAN = "Replan"


WITH_PCP = frozenset("befgh")


@dataclass(frozen=True)
class CollisionPrediction:
    scenario: str
    verdict: Verdict
    pcp: Optional[GridCoord] = None
    t_robot: Optional[float] = None
    t_obstacle: Optional[float] = None
    # distance along the robot path to the pcp, mm; orders predictions
    distance: float = math.inf
    track_id: Optional[int] = None

    def __post_init__(self):
        if self.scenario in "acd" and self.verdict is not Verdict.NO_ACTION:
            raise ValueError(f"scenario {self.scenario} must carry NoAction")
        if (self.pcp is not None) != (self.scenario in WITH_PCP):
            raise ValueError(f"pcp presence inconsistent with scenario {self.scenario}")

    @property
    def actionable(self) -> bool:
        return self.verdict is not Verdict.NO_ACTION


NO_CONFLICT = CollisionPrediction("a", Verdict.NO_ACTION)


@dataclass(frozen=True)
class PredictionParams:
    r: float = 500.0
    margin_angle: float = 15.0
    # seconds; None derives it per obstacle from the current speeds
    margin_t: Optional[float] = None
    safety_cells: int = 1
    # static obstacles trigger a replan when they block the path this close
    static_horizon_cells: int = 4
    # a faster follower stops instead of slowing once this close to the leader
    follow_stop_cells: float = 2.0


@dataclass(frozen=True)
class RobotPath:
    """The straight leg the robot is driving, rasterised up to the horizon."""

    origin: GlobalPoint
    heading: float
    speed: float
    length: float
    cells: np.ndarray
    s: np.ndarray

    @classmethod
    def build(cls, origin: GlobalPoint, heading: float, speed: float, length: float, r: float) -> "RobotPath":
        a = math.radians(heading)
        end = (origin.x + length * math.cos(a), origin.y + length * math.sin(a))
        cells, t = kernels.traverse(origin.x / r + 0.5, origin.y / r + 0.5, end[0] / r + 0.5, end[1] / r + 0.5)
        return cls(origin, heading, speed, length, cells, t * length)

    @property
    def unit(self) -> tuple[float, float]:
        a = math.radians(self.heading)
        return math.cos(a), math.sin(a)

    def first_hit(self, box: Box, max_s: float = math.inf) -> Optional[tuple[GridCoord, float]]:
        """First cell after the start cell that lies in ``box``, with its entry distance."""
        for (gx, gy), s in zip(self.cells[1:], self.s[1:]):
            if s > max_s:
                return None
            if box.contains(gx, gy):
                return GridCoord(int(gx), int(gy)), float(s)
        return None

    def cell_at(self, s: float, r: float) -> GridCoord:
        ux, uy = self.unit
        s = min(max(s, 0.0), self.length)
        return GridCoord(
            math.floor((self.origin.x + s * ux) / r + 0.5), math.floor((self.origin.y + s * uy) / r + 0.5)
        )


def hazard_box(obs: Observation) -> Box:
    """Cells actually struck by the cluster's beams. The corner-based area box
    can reach a cell into free space, so it is kept for matching only."""
    return obs.record.extent


def half_extent_along(box: Box, ux: float, uy: float, r: float) -> float:
    w = (box.x1 - box.x0 + 1) * r
    h = (box.y1 - box.y0 + 1) * r
    return 0.5 * (abs(ux) * w + abs(uy) * h)


def predict(path: RobotPath, obs: Observation, params: PredictionParams = PredictionParams()) -> CollisionPrediction:
    r = params.r
    raw = hazard_box(obs)
    box = raw.inflate(params.safety_cells)
    tid = obs.track_id
    v_r = path.speed
    vx, vy = obs.velocity
    v_o = math.hypot(vx, vy)
    if not obs.moving or v_o < 1e-9:
        hit = path.first_hit(box, params.static_horizon_cells * r)
        if hit is None:
            return NO_CONFLICT
        cell, s = hit
        # pcp on the obstacle itself when the path runs into it
        core = path.first_hit(raw)
        if core is not None:
            cell = core[0]
        return CollisionPrediction("b", Verdict.REPLAN, cell, s / v_r, 0.0, s, tid)

    wx, wy = vx / v_o, vy / v_o
    ux, uy = path.unit
    cosang = max(-1.0, min(1.0, ux * wx + uy * wy))
    ang = math.degrees(math.acos(cosang))
    on_path = path.first_hit(box)

    if ang >= 180.0 - params.margin_angle:
        if on_path is None:
            return NO_CONFLICT
        _, s = on_path
        t_meet = s / (v_r + v_o)
        s_meet = v_r * t_meet
        return CollisionPrediction("f", Verdict.REPLAN, path.cell_at(s_meet, r), t_meet, t_meet, s_meet, tid)

    if ang <= params.margin_angle:
        if on_path is None or v_r <= v_o:
            return NO_CONFLICT
        _, gap = on_path
        t_c = gap / (v_r - v_o)
        s_c = v_r * t_c
        if s_c > path.length:
            return NO_CONFLICT
        verdict = Verdict.STOP_AND_WAIT if gap <= params.follow_stop_cells * r else Verdict.SLOW_DOWN
        return CollisionPrediction("g", verdict, path.cell_at(s_c, r), t_c, t_c, s_c, tid)

    # crossing paths: intersect robot ray origin + s u with obstacle ray z + q w
    z = obs.record.center
    den = ux * wy - uy * wx
    if abs(den) < 1e-12:
        log.warning("degenerate crossing geometry for track %s", tid)
        return NO_CONFLICT
    ex, ey = z.x - path.origin.x, z.y - path.origin.y
    s = (ex * wy - ey * wx) / den
    q = (ex * uy - ey * ux) / den
    if s <= 0.0 or s > path.length:
        return NO_CONFLICT
    t_r = s / v_r
    t_o = q / v_o
    if params.margin_t is not None:
        margin = params.margin_t
    else:
        margin = r / v_r + half_extent_along(raw, wx, wy, r) / v_o
    diff = t_r - t_o
    if abs(diff) <= margin:
        return CollisionPrediction("e", Verdict.STOP_AND_WAIT, path.cell_at(s, r), t_r, max(t_o, 0.0), s, tid)
    if diff > 0:
        return CollisionPrediction("c", Verdict.NO_ACTION, None, t_r, max(t_o, 0.0), s, tid)
    return CollisionPrediction("d", Verdict.NO_ACTION, None, t_r, t_o, s, tid)


def ordered(preds: Sequence[CollisionPrediction]) -> list[CollisionPrediction]:
    """Predictions nearest-first along the path; ties by track id."""
    return sorted(preds, key=lambda p: (p.distance, -1 if p.track_id is None else p.track_id))


def aggregate_scenario(preds: Sequence[CollisionPrediction]) -> str:
    """Scenario label for a whole tick: h when several conflicts coincide."""
    act = [p for p in preds if p.actionable]
    if len(act) >= 2:
        return "h"
    if act:
        return act[0].scenario
    seen = sorted({p.scenario for p in preds if p.scenario != "a"})
    return seen[0] if seen else "a"
