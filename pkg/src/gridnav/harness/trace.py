"""Line-delimited JSON traces and run metrics.

The first trace line is a header describing the world; every following line
is one tick. Keys are emitted in a fixed order so traces can be diffed.
"""
from __future__ import annotations

import json
import math
from pathlib import Path
from typing import Iterable, Optional

from ..navigator import Outcome, RunResult, TickReport, observation_summary
from ..world import WorldConfig


def _f(v: Optional[float]) -> Optional[float]:
    """Floats for JSON: infinities become null, everything else rounded for stable text."""
    if v is None or not math.isfinite(v):
        return None
    return round(float(v), 6)


def _cell(c) -> Optional[list[int]]:
    return None if c is None else [c.gx, c.gy]


def header_record(name: str, scenario: Optional[str], config: WorldConfig, global_path) -> dict:
    s = config.robot_start
    return {
        "type": "header",
        "name": name,
        "scenario": scenario,
        "grid_w": config.grid_w,
        "grid_h": config.grid_h,
        "r": config.r,
        "r_w": config.r_w,
        "T": config.T,
        "start": [s.x, s.y, s.theta],
        "target": [config.target.gx, config.target.gy],
        "v_robot": config.v_robot,
        "global_path": [[c.gx, c.gy] for c in global_path],
    }


def tick_record(rep: TickReport, T: float) -> dict:
    planner = None
    if rep.planner is not None:
        p = rep.planner
        planner = {
            "pcp": _cell(p.pcp),
            "centerline_length": _f(p.centerline_length),
            "sub_target": _cell(p.sub_target),
            "chosen": p.chosen,
            "candidates": [
                {
                    "angle": c.angle,
                    "g": _f(c.g),
                    "dl": _f(c.dl),
                    "w": _f(c.w),
                    "score": _f(c.score),
                    "blocked_by": c.blocked_by,
                    "endpoint": _cell(c.endpoint_cell),
                }
                for c in p.candidates
            ],
        }
    obs = []
    for o in rep.observations:
        d = observation_summary(o, T)
        obs.append(
            {
                "track": d["track"],
                "class": d["class"],
                "sigma_max": _f(d["sigma_max"]),
                "xi": _f(d["xi"]),
                "moving": d["moving"],
                "v": _f(d["v"]),
                "alpha": _f(d["alpha"]),
                "center": [_f(d["center"][0]), _f(d["center"][1])],
                "area": d["area"],
            }
        )
    return {
        "type": "tick",
        "tick": rep.tick,
        "pose": [_f(rep.pose.x), _f(rep.pose.y), _f(rep.pose.theta)],
        "speed": _f(rep.speed),
        "mode": rep.mode,
        "scenario": rep.scenario,
        "verdict": rep.verdict,
        "pcp": _cell(rep.pcp),
        "collision": rep.collision,
        "predictions": [
            {
                "track": p.track_id,
                "scenario": p.scenario,
                "verdict": p.verdict.value,
                "pcp": _cell(p.pcp),
                "t_robot": _f(p.t_robot),
                "t_obstacle": _f(p.t_obstacle),
            }
            for p in rep.predictions
        ],
        "chain": obs,
        "obstacles": [[i, list(fp)] for i, fp in rep.obstacles],
        "planner": planner,
    }


def dumps(rec: dict) -> str:
    return json.dumps(rec, separators=(",", ":"), allow_nan=False)


def write_trace(path: Path, header: dict, reports: Iterable[TickReport], T: float) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps(header) + "\n")
        for rep in reports:
            fh.write(dumps(tick_record(rep, T)) + "\n")


def read_trace(path: str | Path) -> tuple[dict, list[dict]]:
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    if not lines:
        raise ValueError(f"{path}: empty trace")
    header = json.loads(lines[0])
    if header.get("type") != "header":
        raise ValueError(f"{path}: first record is not a header")
    return header, [json.loads(ln) for ln in lines[1:] if ln.strip()]


def metrics(name: str, scenario: Optional[str], res: RunResult, r: float) -> dict:
    path = 0.0
    for a, b in zip(res.trajectory, res.trajectory[1:]):
        path += math.hypot(b.x - a.x, b.y - a.y)
    reached = res.outcome is Outcome.REACHED
    return {
        "name": name,
        "scenario": scenario,
        "outcome": res.outcome.value,
        "ticks_to_target": res.ticks if reached else None,
        "ticks": res.ticks,
        "path_length_cells": round(path / r, 6),
        "morphin_invocations": sum(1 for rep in res.reports if rep.planner is not None),
        "wait_ticks": sum(1 for rep in res.reports if rep.verdict == "StopAndWait"),
        "slowdown_ticks": sum(1 for rep in res.reports if rep.verdict == "SlowDown"),
        "min_clearance_cells": res.min_clearance,
        "collision_count": res.collisions,
    }
