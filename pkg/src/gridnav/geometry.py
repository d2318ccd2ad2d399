"""Local polar, global Cartesian (mm) and grid coordinate frames.

Angles are degrees throughout; the beam spacing of 0.5 deg is exact in that
unit. Headings are measured counter-clockwise from the global +x axis.
"""
import math
from dataclasses import dataclass

BEAM_STEP_DEG = 0.5
N_BEAMS = 361


def normalize_deg(a: float) -> float:
    a = math.fmod(a, 360.0)
    if a < 0.0:
        a += 360.0
    # fmod(-1e-17, 360) + 360 rounds to 360.0
    return 0.0 if a >= 360.0 else a


@dataclass(frozen=True)
class PolarBeam:
    index: int
    rho: float

    def __post_init__(self):
        if not 0 <= self.index < N_BEAMS:
            raise ValueError(f"beam index {self.index} outside [0, {N_BEAMS - 1}]")
        if self.rho < 0:
            raise ValueError("rho must be non-negative")

    @property
    def alpha(self) -> float:
        return self.index * BEAM_STEP_DEG


@dataclass(frozen=True)
class Pose:
    x: float
    y: float
    theta: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "theta", normalize_deg(self.theta))


@dataclass(frozen=True)
class GlobalPoint:
    x: float
    y: float

    def dist(self, other: "GlobalPoint") -> float:
        return math.hypot(self.x - other.x, self.y - other.y)


@dataclass(frozen=True, order=True)
class GridCoord:
    gx: int
    gy: int


def polar_to_global_xy(robot: Pose, rho: float, alpha: float) -> GlobalPoint:
    a = math.radians(robot.theta - alpha)
    return GlobalPoint(robot.x + rho * math.cos(a), robot.y + rho * math.sin(a))


def polar_to_global(robot: Pose, beam: PolarBeam) -> GlobalPoint:
    """x_o = x_R + rho cos(theta_R - alpha), y_o = y_R + rho sin(theta_R - alpha)."""
    return polar_to_global_xy(robot, beam.rho, beam.alpha)


def to_grid(v: float, r: float) -> int:
    return math.floor(v / r + 0.5)


def global_to_grid(p: GlobalPoint, r: float) -> GridCoord:
    if r <= 0:
        raise ValueError("grid resolution must be positive")
    return GridCoord(to_grid(p.x, r), to_grid(p.y, r))


def grid_center(c: GridCoord, r: float) -> GlobalPoint:
    return GlobalPoint(c.gx * r, c.gy * r)
