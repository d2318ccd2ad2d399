"""Ground-truth grid world: scripted obstacles, robot kinematics, laser scan."""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from . import kernels
from .geometry import BEAM_STEP_DEG, N_BEAMS, GridCoord, Pose, to_grid


class ConfigError(ValueError):
    """Invalid world or scenario configuration."""


class RobotOutOfBounds(RuntimeError):
    pass


@dataclass(frozen=True)
class WorldConfig:
    grid_w: int
    grid_h: int
    robot_start: Pose
    target: GridCoord
    r: float = 500.0
    r_w: int = 8
    T: float = 0.5
    v_robot: float = 100.0
    # the laser reports a hit this far past the cell face, so the hit point
    # rounds into the struck cell instead of onto a shared boundary
    hit_bias: float = 1.0

    def __post_init__(self):
        errors = []
        if self.grid_w < 1 or self.grid_h < 1:
            errors.append("grid_w and grid_h must be >= 1")
        if self.r <= 0:
            errors.append("r must be > 0")
        if self.r_w < 1:
            errors.append("r_w must be >= 1")
        if self.T <= 0:
            errors.append("T must be > 0")
        if self.v_robot < 0:
            errors.append("v_robot must be >= 0")
        if not (0 <= self.target.gx < self.grid_w and 0 <= self.target.gy < self.grid_h):
            errors.append(f"target {self.target} outside the grid")
        start = GridCoord(to_grid(self.robot_start.x, self.r), to_grid(self.robot_start.y, self.r))
        if not (0 <= start.gx < self.grid_w and 0 <= start.gy < self.grid_h):
            errors.append(f"robot start cell {start} outside the grid")
        if errors:
            raise ConfigError("; ".join(errors))

    @property
    def max_range(self) -> float:
        return self.r_w * self.r


@dataclass(frozen=True)
class ObstacleScript:
    """A rectangle of cells ``(gx0, gy0)..(gx1, gy1)`` inclusive, moving at ``v`` mm/s.

    ``angle`` is the direction of motion in degrees counter-clockwise from +x.
    The obstacle exists for ``spawn_tick <= tick < despawn_tick``.
    """

    id: str
    footprint: tuple[int, int, int, int]
    spawn_tick: int = 0
    v: float = 0.0
    angle: float = 0.0
    despawn_tick: Optional[int] = None

    def __post_init__(self):
        gx0, gy0, gx1, gy1 = self.footprint
        if gx1 < gx0 or gy1 < gy0:
            raise ConfigError(f"obstacle {self.id}: empty footprint {self.footprint}")
        if self.v < 0:
            raise ConfigError(f"obstacle {self.id}: negative speed")
        if self.spawn_tick < 0:
            raise ConfigError(f"obstacle {self.id}: negative spawn_tick")
        if self.despawn_tick is not None and self.despawn_tick <= self.spawn_tick:
            raise ConfigError(f"obstacle {self.id}: despawn_tick must exceed spawn_tick")

    @property
    def is_static(self) -> bool:
        return self.v == 0.0

    def alive(self, tick: int) -> bool:
        return self.spawn_tick <= tick and (self.despawn_tick is None or tick < self.despawn_tick)

    def offset(self, tick: int, T: float) -> tuple[float, float]:
        """Continuous displacement (mm) from the spawn position."""
        s = self.v * T * (tick - self.spawn_tick)
        a = math.radians(self.angle)
        return s * math.cos(a), s * math.sin(a)

    def cells_at(self, tick: int, T: float, r: float) -> tuple[int, int, int, int]:
        ox, oy = self.offset(tick, T)
        sx, sy = to_grid(ox, r), to_grid(oy, r)
        gx0, gy0, gx1, gy1 = self.footprint
        return gx0 + sx, gy0 + sy, gx1 + sx, gy1 + sy


@dataclass(frozen=True)
class RobotCommand:
    speed: float
    heading: float


@dataclass(frozen=True)
class WorldState:
    config: WorldConfig
    scripts: tuple[ObstacleScript, ...]
    tick: int
    robot: Pose
    speed: float = 0.0

    @classmethod
    def initial(cls, config: WorldConfig, scripts) -> "WorldState":
        ids = [s.id for s in scripts]
        if len(set(ids)) != len(ids):
            raise ConfigError("obstacle ids must be unique")
        return cls(config, tuple(scripts), 0, config.robot_start, 0.0)

    def live_obstacles(self) -> list[tuple[str, tuple[int, int, int, int]]]:
        c = self.config
        return [
            (s.id, s.cells_at(self.tick, c.T, c.r)) for s in self.scripts if s.alive(self.tick)
        ]

    def occupancy(self) -> np.ndarray:
        c = self.config
        occ = np.zeros((c.grid_h, c.grid_w), dtype=np.bool_)
        for _, (gx0, gy0, gx1, gy1) in self.live_obstacles():
            x0, x1 = max(gx0, 0), min(gx1, c.grid_w - 1)
            y0, y1 = max(gy0, 0), min(gy1, c.grid_h - 1)
            if x0 <= x1 and y0 <= y1:
                occ[y0 : y1 + 1, x0 : x1 + 1] = True
        return occ

    @property
    def robot_cell(self) -> GridCoord:
        r = self.config.r
        return GridCoord(to_grid(self.robot.x, r), to_grid(self.robot.y, r))

    def in_collision(self) -> bool:
        c = self.robot_cell
        for _, (gx0, gy0, gx1, gy1) in self.live_obstacles():
            if gx0 <= c.gx <= gx1 and gy0 <= c.gy <= gy1:
                return True
        return False

    def clearance_cells(self) -> Optional[int]:
        """Chebyshev distance in cells from the robot cell to the nearest obstacle cell."""
        c = self.robot_cell
        best = None
        for _, (gx0, gy0, gx1, gy1) in self.live_obstacles():
            dx = max(gx0 - c.gx, 0, c.gx - gx1)
            dy = max(gy0 - c.gy, 0, c.gy - gy1)
            d = max(dx, dy)
            best = d if best is None else min(best, d)
        return best


def step(state: WorldState, command: RobotCommand) -> WorldState:
    """Advance one scan period: obstacles follow their scripts, the robot drives."""
    if command.speed < 0:
        raise ValueError("commanded speed must be >= 0")
    c = state.config
    a = math.radians(command.heading)
    d = command.speed * c.T
    robot = Pose(state.robot.x + d * math.cos(a), state.robot.y + d * math.sin(a), command.heading)
    nxt = replace(state, tick=state.tick + 1, robot=robot, speed=command.speed)
    cell = nxt.robot_cell
    if not (0 <= cell.gx < c.grid_w and 0 <= cell.gy < c.grid_h):
        raise RobotOutOfBounds(f"robot left the grid at cell {cell} (tick {nxt.tick})")
    return nxt


@dataclass(frozen=True)
class LaserScan:
    """361 ranges over [0, 180] deg. ``origin`` is the sensor frame used in the
    polar-to-global transform: its theta is the robot heading + 90 deg, so beam
    0 looks left, beam 180 straight ahead and beam 360 right."""

    origin: Pose
    ranges: np.ndarray
    no_return: np.ndarray
    max_range: float

    @property
    def alphas(self) -> np.ndarray:
        return np.arange(N_BEAMS) * BEAM_STEP_DEG

    def points(self) -> tuple[np.ndarray, np.ndarray]:
        a = np.radians(self.origin.theta - self.alphas)
        return self.origin.x + self.ranges * np.cos(a), self.origin.y + self.ranges * np.sin(a)


def sensor_pose(robot: Pose) -> Pose:
    return Pose(robot.x, robot.y, robot.theta + 90.0)


_ALPHAS = np.arange(N_BEAMS) * BEAM_STEP_DEG


def scan(state: WorldState, occ: Optional[np.ndarray] = None) -> LaserScan:
    c = state.config
    origin = sensor_pose(state.robot)
    if occ is None:
        occ = state.occupancy()
    a = np.radians(origin.theta - _ALPHAS)
    dx, dy = np.cos(a), np.sin(a)
    ox = state.robot.x / c.r + 0.5
    oy = state.robot.y / c.r + 0.5
    t, hit = kernels.raycast(occ, ox, oy, dx, dy, float(c.r_w))
    ranges = np.where(hit, np.minimum(t * c.r + c.hit_bias, c.max_range), c.max_range)
    return LaserScan(origin, ranges, ~hit, c.max_range)


def seen_free(sc: LaserScan, config: WorldConfig) -> np.ndarray:
    """(grid_w, grid_h) mask of cells some beam of ``sc`` passed through."""
    r = config.r
    a = np.radians(sc.origin.theta - _ALPHAS)
    t = np.where(sc.no_return, float(config.r_w), (sc.ranges - config.hit_bias) / r)
    return kernels.free_cells(
        config.grid_w, config.grid_h, sc.origin.x / r + 0.5, sc.origin.y / r + 0.5, np.cos(a), np.sin(a), t
    )
