"""The per-tick navigation loop.

Each scan period: read the laser, cluster, analyse, recognise, predict
collisions, then act on the nearest actionable prediction (slow down, stop
and wait, or replan with Morphin) and advance the world.
"""
from __future__ import annotations

import enum
import logging
import math
from dataclasses import dataclass, field, replace
from typing import Callable, Optional, Sequence

from .analysis import analyze_chain
from .clustering import cluster_scan, merge_touching
from .geometry import GlobalPoint, GridCoord, Pose
from .morphin import Hazard, MorphinPlan, NoFeasiblePath, PlannerParams, line_cells, plan
from .prediction import (
    CollisionPrediction,
    PredictionParams,
    RobotPath,
    Verdict,
    aggregate_scenario,
    hazard_box,
    ordered,
    predict,
)
from .recognition import Observation, RecognitionThresholds, Tracker, motion_from_velocity
from .world import ObstacleScript, RobotCommand, RobotOutOfBounds, WorldConfig, WorldState, scan, seen_free, step

log = logging.getLogger(__name__)

ARRIVE_EPS = 1e-6


class Mode(str, enum.Enum):
    FOLLOW = "FollowGlobal"
    DETOUR = "Detour"
    WAITING = "Waiting"


class Outcome(str, enum.Enum):
    REACHED = "ReachedTarget"
    TIMEOUT = "Timeout"
    NO_PATH = "NoFeasiblePath"
    OUT_OF_BOUNDS = "RobotOutOfBounds"


@dataclass(frozen=True)
class NavParams:
    lam: float = 1.2
    # join clusters whose struck cells touch (one grid obstacle, several clusters)
    merge_fragments: bool = True
    thresholds: RecognitionThresholds = field(default_factory=RecognitionThresholds)
    y_delta: float = 0.5
    y_eta: float = 0.5
    kappa: tuple[float, float, float] = (1.0, 1.3, 0.6)
    fan: tuple[float, ...] = PlannerParams.fan
    margin_angle: float = 15.0
    margin_t: Optional[float] = None
    safety_cells: int = 1
    static_horizon_cells: int = 4
    follow_stop_cells: float = 2.0
    slowdown_fraction: float = 0.25
    min_candidate_cells: float = 2.0
    track_window: int = 20
    # consecutive ticks without a feasible Morphin path before giving up
    stuck_limit: int = 40


@dataclass
class NavigatorState:
    mode: Mode
    cruise: float
    speed: float
    waypoints: list
    pcp: Optional[GridCoord] = None
    trajectory: list = field(default_factory=list)
    stuck: int = 0


@dataclass(frozen=True)
class PlannerRecord:
    pcp: GridCoord
    centerline_length: float
    candidates: list
    chosen: Optional[int]
    sub_target: Optional[GridCoord]


@dataclass(frozen=True)
class TickReport:
    tick: int
    pose: Pose
    speed: float
    mode: str
    observations: list
    predictions: list
    scenario: str
    verdict: str
    pcp: Optional[GridCoord]
    planner: Optional[PlannerRecord]
    collision: bool
    # ground-truth footprints (id, (gx0, gy0, gx1, gy1)) during this tick
    obstacles: list = field(default_factory=list)


@dataclass
class RunResult:
    outcome: Outcome
    ticks: int
    trajectory: list
    reports: list
    collisions: int
    min_clearance: Optional[int]
    global_path: list
    final_state: WorldState


class Navigator:
    def __init__(self, config: WorldConfig, params: NavParams = NavParams()):
        self.config = config
        self.params = params
        r = config.r
        self.tracker = Tracker(
            r, config.T, params.thresholds, params.y_delta, params.y_eta, window=params.track_window
        )
        self.pred_params = PredictionParams(
            r=r,
            margin_angle=params.margin_angle,
            margin_t=params.margin_t,
            safety_cells=params.safety_cells,
            static_horizon_cells=params.static_horizon_cells,
            follow_stop_cells=params.follow_stop_cells,
        )
        self.start_cell = GridCoord(math.floor(config.robot_start.x / r + 0.5), math.floor(config.robot_start.y / r + 0.5))
        self.global_path = line_cells(self.start_cell, config.target)
        self.target_point = GlobalPoint(config.target.gx * r, config.target.gy * r)
        # cells of static obstacles seen earlier, dropped once seen free
        self.memory: set = set()

    # -- perception -------------------------------------------------------

    def perceive(self, state: WorldState) -> list[Observation]:
        c = self.config
        sc = scan(state)
        chain = cluster_scan(sc, self.params.lam, c.r_w, c.r)
        if self.params.merge_fragments:
            chain = merge_touching(chain, sc.origin, c.r)
        records = analyze_chain(chain, sc.origin, c.r)
        free = seen_free(sc, c)
        obs = self.tracker.update(records, state.tick, free)
        # remembered static cells: forget what the scan sees through, add what
        # non-moving obstacles occupy now
        self.memory = {cell for cell in self.memory if not free[cell]}
        for o in obs:
            if not o.moving:
                self.memory.update((gx, gy) for gx, gy in o.record.cells if 0 <= gx < c.grid_w and 0 <= gy < c.grid_h)
        return obs

    # -- geometry helpers ---------------------------------------------------

    def goal(self, nav: NavigatorState) -> GlobalPoint:
        return nav.waypoints[0] if nav.waypoints else self.target_point

    def leg(self, pos: GlobalPoint, nav: NavigatorState, speed: float) -> Optional[RobotPath]:
        g = self.goal(nav)
        d = pos.dist(g)
        if d < ARRIVE_EPS:
            return None
        heading = math.degrees(math.atan2(g.y - pos.y, g.x - pos.x))
        length = min(d, self.config.max_range)
        return RobotPath.build(pos, heading, speed, length, self.config.r)

    def predictions(self, pos: GlobalPoint, nav: NavigatorState, obs: Sequence[Observation], speed: float):
        path = self.leg(pos, nav, speed)
        if path is None:
            return []
        return ordered([predict(path, o, self.pred_params) for o in obs])

    # -- acting -------------------------------------------------------------

    def threatened(self, pos: GlobalPoint, obs: Sequence[Observation]) -> bool:
        """Whether a moving obstacle's inflated box sweeps the robot's cell
        within the time it needs to cross the sliding window."""
        c = self.config
        gx, gy = math.floor(pos.x / c.r + 0.5), math.floor(pos.y / c.r + 0.5)
        k = self.params.safety_cells
        for o in obs:
            if not o.moving or o.speed <= 0:
                continue
            b = hazard_box(o).inflate(k)
            vx, vy = o.velocity
            horizon = c.max_range / o.speed
            # cell units swept over [0, horizon]
            dx, dy = vx * horizon / c.r, vy * horizon / c.r
            # slab test of the robot cell centre against the swept box
            lo, hi = 0.0, 1.0
            for p0, lo_b, hi_b, d in ((gx, b.x0 - 0.5, b.x1 + 0.5, dx), (gy, b.y0 - 0.5, b.y1 + 0.5, dy)):
                if abs(d) < 1e-12:
                    if not lo_b < p0 < hi_b:
                        lo, hi = 1.0, 0.0
                    continue
                t0, t1 = (lo_b - p0) / -d, (hi_b - p0) / -d
                if t0 > t1:
                    t0, t1 = t1, t0
                lo, hi = max(lo, t0), min(hi, t1)
            if lo <= hi:
                return True
        return False

    def replan(self, pos: GlobalPoint, pred: CollisionPrediction, obs: Sequence[Observation]) -> MorphinPlan:
        p = self.params
        c = self.config
        hazards = [Hazard(hazard_box(o), o.velocity if o.moving else (0.0, 0.0)) for o in obs]
        trigger = next((hazard_box(o) for o in obs if o.track_id == pred.track_id), None)
        extra = 0
        if pred.scenario == "g" and trigger is not None:
            extra = max(trigger.x1 - trigger.x0, trigger.y1 - trigger.y0) + 1
        params = PlannerParams(
            r=c.r,
            kappa=p.kappa,
            fan=p.fan,
            safety_cells=p.safety_cells,
            min_length_cells=p.min_candidate_cells,
            rejoin_extra_cells=extra,
        )
        margin = 0.5 * c.r / c.v_robot + c.T
        live = set().union(*(o.record.cells for o in obs)) if obs else set()
        return plan(
            pos, pred.pcp, self.global_path, c.target, hazards, trigger, c.v_robot,
            (c.grid_w, c.grid_h), params, margin, frozenset(self.memory - live),
        )

    def act(
        self, nav: NavigatorState, pos: GlobalPoint, preds: Sequence[CollisionPrediction], obs: Sequence[Observation]
    ) -> tuple[RobotCommand, Optional[CollisionPrediction], Optional[PlannerRecord], bool]:
        """Apply the nearest actionable prediction. Returns the command, the
        prediction that drove it, the planner record, and a no-path flag."""
        actionable = [q for q in preds if q.actionable]
        lead = actionable[0] if actionable else None
        record = None
        no_path = False
        if lead is None:
            if nav.mode is Mode.WAITING:
                nav.mode = Mode.DETOUR if nav.waypoints else Mode.FOLLOW
                nav.pcp = None
            nav.speed = nav.cruise
        elif lead.verdict is Verdict.REPLAN:
            try:
                mp = self.replan(pos, lead, obs)
            except NoFeasiblePath as exc:
                record = PlannerRecord(lead.pcp, 0.0, exc.candidates, None, None)
                nav.speed = 0.0
                nav.stuck += 1
                no_path = True
            else:
                idx = mp.candidates.index(mp.chosen)
                record = PlannerRecord(lead.pcp, mp.centerline_length, mp.candidates, idx, mp.sub_target)
                r = self.config.r
                nav.waypoints = [mp.chosen.endpoint, GlobalPoint(mp.sub_target.gx * r, mp.sub_target.gy * r)]
                nav.mode = Mode.DETOUR
                nav.pcp = None
                nav.speed = nav.cruise
                nav.stuck = 0
        elif lead.verdict is Verdict.STOP_AND_WAIT and self.threatened(pos, obs):
            # stopping cannot avoid an obstacle that will sweep the robot's own cell
            lead = replace(lead, verdict=Verdict.REPLAN)
            return self.act(nav, pos, [lead], obs)
        elif lead.verdict is Verdict.STOP_AND_WAIT:
            nav.mode = Mode.WAITING
            nav.pcp = lead.pcp
            nav.speed = 0.0
        elif lead.verdict is Verdict.SLOW_DOWN:
            base = nav.speed if nav.speed > 0 else nav.cruise
            nav.speed = max(0.0, base - self.params.slowdown_fraction * base)
            if nav.mode is Mode.WAITING:
                nav.mode = Mode.DETOUR if nav.waypoints else Mode.FOLLOW
                nav.pcp = None
        if not no_path:
            nav.stuck = 0
        g = self.goal(nav)
        d = pos.dist(g)
        heading = math.degrees(math.atan2(g.y - pos.y, g.x - pos.x)) if d > ARRIVE_EPS else 0.0
        speed = min(nav.speed, d / self.config.T)
        return RobotCommand(speed, heading), lead, record, no_path

    # -- loop ---------------------------------------------------------------

    def run(
        self,
        scripts: Sequence[ObstacleScript],
        max_ticks: int = 2000,
        on_tick: Optional[Callable[[TickReport], None]] = None,
    ) -> RunResult:
        if max_ticks <= 0:
            raise ValueError("max_ticks must be positive")
        c = self.config
        self.tracker.reset()
        self.memory = set()
        state = WorldState.initial(c, scripts)
        nav = NavigatorState(Mode.FOLLOW, c.v_robot, c.v_robot, [])
        nav.trajectory.append(state.robot)
        reports = []
        collisions = 0
        min_clear = state.clearance_cells()
        outcome = Outcome.TIMEOUT

        while state.tick < max_ticks:
            pos = GlobalPoint(state.robot.x, state.robot.y)
            if pos.dist(self.target_point) < ARRIVE_EPS:
                outcome = Outcome.REACHED
                break
            # waypoint bookkeeping: drop reached detour points
            while nav.waypoints and pos.dist(nav.waypoints[0]) < ARRIVE_EPS:
                nav.waypoints.pop(0)
            if not nav.waypoints and nav.mode is Mode.DETOUR:
                nav.mode = Mode.FOLLOW

            truth = state.live_obstacles()
            obs = self.perceive(state)
            plan_speed = nav.speed if nav.speed > 0 else nav.cruise
            preds = self.predictions(pos, nav, obs, plan_speed)
            cmd, lead, record, no_path = self.act(nav, pos, preds, obs)

            try:
                state = step(state, cmd)
            except RobotOutOfBounds:
                outcome = Outcome.OUT_OF_BOUNDS
                break
            hit = state.in_collision()
            collisions += hit
            clear = state.clearance_cells()
            if clear is not None:
                min_clear = clear if min_clear is None else min(min_clear, clear)
            nav.trajectory.append(state.robot)

            rep = TickReport(
                tick=state.tick - 1,
                pose=Pose(pos.x, pos.y, cmd.heading),
                speed=cmd.speed,
                mode=nav.mode.value,
                observations=list(obs),
                predictions=list(preds),
                scenario=aggregate_scenario(preds),
                verdict=lead.verdict.value if lead else Verdict.NO_ACTION.value,
                pcp=lead.pcp if lead else None,
                planner=record,
                collision=bool(hit),
                obstacles=truth,
            )
            reports.append(rep)
            if on_tick is not None:
                on_tick(rep)
            if no_path and nav.stuck >= self.params.stuck_limit:
                outcome = Outcome.NO_PATH
                break
        else:
            pos = GlobalPoint(state.robot.x, state.robot.y)
            if pos.dist(self.target_point) < ARRIVE_EPS:
                outcome = Outcome.REACHED

        return RunResult(
            outcome=outcome,
            ticks=state.tick,
            trajectory=nav.trajectory,
            reports=reports,
            collisions=collisions,
            min_clearance=min_clear,
            global_path=self.global_path,
            final_state=state,
        )


def run(config: WorldConfig, scripts: Sequence[ObstacleScript], params: NavParams = NavParams(), max_ticks: int = 2000) -> RunResult:
    return Navigator(config, params).run(scripts, max_ticks)


def observation_summary(o: Observation, T: float) -> dict:
    m = motion_from_velocity(*o.velocity, T) if o.moving else None
    return {
        "track": o.track_id,
        "class": o.label.value,
        "sigma_max": o.sigma_max,
        "xi": o.xi,
        "moving": o.moving,
        "v": m.v if m else 0.0,
        "alpha": m.alpha if m else 0.0,
        "center": [o.record.center.x, o.record.center.y],
        "area": o.record.area.as_list(),
    }
