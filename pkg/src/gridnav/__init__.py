"""Deterministic 2D grid-world navigation: laser scan, clustering, obstacle
recognition, collision prediction and a fan-of-lines local planner."""
from .geometry import GlobalPoint, GridCoord, PolarBeam, Pose, global_to_grid, polar_to_global
from .navigator import Navigator, NavParams, Outcome, RunResult, run
from .world import ObstacleScript, WorldConfig

__version__ = "0.1.0"

__all__ = [
    "GlobalPoint",
    "GridCoord",
    "NavParams",
    "Navigator",
    "ObstacleScript",
    "Outcome",
    "PolarBeam",
    "Pose",
    "RunResult",
    "WorldConfig",
    "global_to_grid",
    "polar_to_global",
    "run",
]
