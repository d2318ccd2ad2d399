"""Scenario config files (YAML).

Layout::

    name: b
    scenario: b            # optional suite label (a-h) used by ``compare``
    angle_ref: x           # x: degrees CCW from +x; y: degrees from +y towards +x
    max_ticks: 2000
    world:
      grid_w: 20
      grid_h: 12
      r: 500
      r_w: 8
      T: 0.5
      robot: {x: 1000, y: 3000, theta: 0, speed: 100}
      target: [14, 6]
    obstacles:
      - {id: S1, footprint: [8, 5, 9, 7], spawn_tick: 0, v: 0, angle: 0, despawn_tick: null}
    params:                # optional navigator overrides
      margin_angle: 15
"""
from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional

import yaml

from ..geometry import GridCoord, Pose
from ..navigator import NavParams
from ..recognition import RecognitionThresholds
from ..world import ConfigError, ObstacleScript, WorldConfig

ANGLE_REFS = ("x", "y")

# navigator overrides accepted under ``params`` and their coercions
_PARAM_KEYS = {
    "lambda": ("lam", float),
    "merge_fragments": ("merge_fragments", bool),
    "y_delta": ("y_delta", float),
    "y_eta": ("y_eta", float),
    "kappa": ("kappa", lambda v: tuple(float(x) for x in v)),
    "fan": ("fan", lambda v: tuple(float(x) for x in v)),
    "margin_angle": ("margin_angle", float),
    "margin_t": ("margin_t", lambda v: None if v is None else float(v)),
    "safety_cells": ("safety_cells", int),
    "static_horizon_cells": ("static_horizon_cells", int),
    "follow_stop_cells": ("follow_stop_cells", float),
    "slowdown_fraction": ("slowdown_fraction", float),
    "min_candidate_cells": ("min_candidate_cells", float),
    "track_window": ("track_window", int),
    "stuck_limit": ("stuck_limit", int),
}
_THRESHOLD_KEYS = ("theta_s1", "theta_s2", "theta_delta", "theta_xi")


class ConfigInvalid(ValueError):
    """Raised with one message per offending field."""

    def __init__(self, errors: list[str], source: str = ""):
        self.errors = list(errors)
        self.source = source
        head = f"{source}: " if source else ""
        super().__init__(head + "; ".join(self.errors))


@dataclass(frozen=True)
class ObstacleSpec:
    id: str
    footprint: tuple[int, int, int, int]
    spawn_tick: int = 0
    v: float = 0.0
    angle: float = 0.0
    despawn_tick: Optional[int] = None


@dataclass(frozen=True)
class Scenario:
    name: str
    world: WorldConfig
    obstacles: tuple[ObstacleSpec, ...] = ()
    scenario: Optional[str] = None
    angle_ref: str = "x"
    max_ticks: int = 2000
    params: dict = field(default_factory=dict)

    def scripts(self) -> list[ObstacleScript]:
        out = []
        for o in self.obstacles:
            ang = o.angle if self.angle_ref == "x" else 90.0 - o.angle
            out.append(ObstacleScript(o.id, o.footprint, o.spawn_tick, o.v, ang % 360.0, o.despawn_tick))
        return out

    def nav_params(self) -> NavParams:
        kw = {}
        th = {}
        for k, v in self.params.items():
            if k in _THRESHOLD_KEYS:
                th[k] = float(v)
            else:
                name, conv = _PARAM_KEYS[k]
                kw[name] = conv(v)
        if th:
            kw["thresholds"] = RecognitionThresholds(**th)
        return NavParams(**kw)

    def with_T(self, T: float) -> "Scenario":
        return dataclasses.replace(self, world=dataclasses.replace(self.world, T=T))


def _num(d: dict, key: str, errs: list, where: str, default=None, kind=float, required=False):
    if key not in d or d[key] is None:
        if required:
            errs.append(f"{where}.{key}: required")
        return default
    v = d[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        errs.append(f"{where}.{key}: expected a number, got {v!r}")
        return default
    if kind is int:
        if float(v) != int(v):
            errs.append(f"{where}.{key}: expected an integer, got {v!r}")
            return default
        return int(v)
    if not math.isfinite(float(v)):
        errs.append(f"{where}.{key}: must be finite")
        return default
    return float(v)


def _int_list(v: Any, n: int, where: str, errs: list) -> Optional[tuple]:
    if not isinstance(v, (list, tuple)) or len(v) != n or not all(isinstance(x, int) and not isinstance(x, bool) for x in v):
        errs.append(f"{where}: expected a list of {n} integers, got {v!r}")
        return None
    return tuple(v)


def parse(doc: Any, source: str = "") -> Scenario:
    errs: list[str] = []
    if not isinstance(doc, dict):
        raise ConfigInvalid(["top level: expected a mapping"], source)
    known = {"name", "scenario", "angle_ref", "max_ticks", "world", "obstacles", "params"}
    for k in doc:
        if k not in known:
            errs.append(f"{k}: unknown field")
    name = doc.get("name")
    if not isinstance(name, str) or not name:
        errs.append("name: required non-empty string")
    label = doc.get("scenario")
    if label is not None and (not isinstance(label, str) or label not in "abcdefgh" or len(label) != 1):
        errs.append(f"scenario: expected one of a-h, got {label!r}")
    angle_ref = doc.get("angle_ref", "x")
    if angle_ref not in ANGLE_REFS:
        errs.append(f"angle_ref: expected one of {ANGLE_REFS}, got {angle_ref!r}")
    max_ticks = _num(doc, "max_ticks", errs, "", 2000, int)
    if max_ticks is not None and max_ticks <= 0:
        errs.append(".max_ticks: must be positive")

    w = doc.get("world")
    world = None
    if not isinstance(w, dict):
        errs.append("world: required mapping")
    else:
        for k in w:
            if k not in {"grid_w", "grid_h", "r", "r_w", "T", "robot", "target"}:
                errs.append(f"world.{k}: unknown field")
        gw = _num(w, "grid_w", errs, "world", kind=int, required=True)
        gh = _num(w, "grid_h", errs, "world", kind=int, required=True)
        r = _num(w, "r", errs, "world", 500.0)
        r_w = _num(w, "r_w", errs, "world", 8, int)
        T = _num(w, "T", errs, "world", 0.5)
        rob = w.get("robot")
        pose = None
        speed = 100.0
        if not isinstance(rob, dict):
            errs.append("world.robot: required mapping with x, y, theta, speed")
        else:
            for k in rob:
                if k not in {"x", "y", "theta", "speed"}:
                    errs.append(f"world.robot.{k}: unknown field")
            x = _num(rob, "x", errs, "world.robot", required=True)
            y = _num(rob, "y", errs, "world.robot", required=True)
            th = _num(rob, "theta", errs, "world.robot", 0.0)
            speed = _num(rob, "speed", errs, "world.robot", 100.0)
            if x is not None and y is not None:
                pose = Pose(x, y, th)
        tgt = _int_list(w.get("target"), 2, "world.target", errs)
        if not errs:
            try:
                world = WorldConfig(gw, gh, pose, GridCoord(*tgt), r=r, r_w=r_w, T=T, v_robot=speed)
            except ConfigError as exc:
                errs.append(f"world: {exc}")

    obstacles = []
    obs = doc.get("obstacles", []) or []
    if not isinstance(obs, list):
        errs.append("obstacles: expected a list")
        obs = []
    seen = set()
    for i, o in enumerate(obs):
        where = f"obstacles[{i}]"
        if not isinstance(o, dict):
            errs.append(f"{where}: expected a mapping")
            continue
        for k in o:
            if k not in {"id", "footprint", "spawn_tick", "v", "angle", "despawn_tick"}:
                errs.append(f"{where}.{k}: unknown field")
        oid = o.get("id")
        if not isinstance(oid, (str, int)) or isinstance(oid, bool):
            errs.append(f"{where}.id: required string")
            continue
        oid = str(oid)
        if oid in seen:
            errs.append(f"{where}.id: duplicate id {oid!r}")
        seen.add(oid)
        fp = _int_list(o.get("footprint"), 4, f"{where}.footprint", errs)
        spawn = _num(o, "spawn_tick", errs, where, 0, int)
        v = _num(o, "v", errs, where, 0.0)
        ang = _num(o, "angle", errs, where, 0.0)
        desp = _num(o, "despawn_tick", errs, where, None, int)
        if fp is None:
            continue
        spec = ObstacleSpec(oid, fp, spawn, v, ang, desp)
        try:
            ObstacleScript(spec.id, spec.footprint, spec.spawn_tick, spec.v, spec.angle, spec.despawn_tick)
        except (ConfigError, ValueError) as exc:
            errs.append(f"{where}: {exc}")
        obstacles.append(spec)

    params = doc.get("params", {}) or {}
    if not isinstance(params, dict):
        errs.append("params: expected a mapping")
        params = {}
    for k in params:
        if k not in _PARAM_KEYS and k not in _THRESHOLD_KEYS:
            errs.append(f"params.{k}: unknown parameter")

    if errs:
        raise ConfigInvalid(errs, source)
    sc = Scenario(name, world, tuple(obstacles), label, angle_ref, max_ticks, dict(params))
    try:
        sc.nav_params()
    except (TypeError, ValueError) as exc:
        raise ConfigInvalid([f"params: {exc}"], source) from exc
    if world is not None and not (0 <= world.target.gx < world.grid_w and 0 <= world.target.gy < world.grid_h):
        raise ConfigInvalid([f"world.target: {world.target} outside the grid"], source)
    return sc


def load(path: str | Path) -> Scenario:
    path = Path(path)
    try:
        doc = yaml.safe_load(path.read_text())
    except yaml.YAMLError as exc:
        raise ConfigInvalid([f"yaml: {exc}"], str(path)) from exc
    return parse(doc, str(path))


def to_dict(sc: Scenario) -> dict:
    w = sc.world
    d: dict[str, Any] = {"name": sc.name}
    if sc.scenario is not None:
        d["scenario"] = sc.scenario
    d["angle_ref"] = sc.angle_ref
    d["max_ticks"] = sc.max_ticks
    d["world"] = {
        "grid_w": w.grid_w,
        "grid_h": w.grid_h,
        "r": w.r,
        "r_w": w.r_w,
        "T": w.T,
        "robot": {"x": w.robot_start.x, "y": w.robot_start.y, "theta": w.robot_start.theta, "speed": w.v_robot},
        "target": [w.target.gx, w.target.gy],
    }
    d["obstacles"] = [
        {
            "id": o.id,
            "footprint": list(o.footprint),
            "spawn_tick": o.spawn_tick,
            "v": o.v,
            "angle": o.angle,
            "despawn_tick": o.despawn_tick,
        }
        for o in sc.obstacles
    ]
    if sc.params:
        d["params"] = {k: (list(v) if isinstance(v, tuple) else v) for k, v in sc.params.items()}
    return d


def dump(sc: Scenario) -> str:
    return yaml.safe_dump(to_dict(sc), sort_keys=False, default_flow_style=None)
