"""Obstacle type recognition (new / static / dynamic) and motion estimation."""
from __future__ import annotations

import enum
import math
from collections import deque
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .analysis import BestMatch, ObstacleRecord, coincidence, max_spatial_correlation
from .geometry import GlobalPoint, normalize_deg


class Label(str, enum.Enum):
    NEW = "new"
    STATIC = "static"
    DYNAMIC = "dynamic"


@dataclass(frozen=True)
class RecognitionThresholds:
    theta_s1: float = 0.30
    theta_s2: float = 0.7
    theta_delta: float = 0.4
    theta_xi: float = 0.5

    def __post_init__(self):
        if not 0 < self.theta_s1 < self.theta_s2 < 1:
            raise ValueError("need 0 < theta_s1 < theta_s2 < 1")
        if self.theta_delta < 0:
            raise ValueError("theta_delta must be >= 0")
        if not 0 <= self.theta_xi <= 1:
            raise ValueError("theta_xi must lie in [0, 1]")


def decide(sigma_max: float, delta: float, xi: float, th: RecognitionThresholds) -> Label:
    """The decision tree. Boundary values fall through to the else-branch."""
    if sigma_max < th.theta_s1:
        return Label.NEW
    if sigma_max > th.theta_s2:
        return Label.STATIC
    if delta < th.theta_delta:
        return Label.STATIC
    if xi < th.theta_xi:
        return Label.DYNAMIC
    return Label.STATIC


@dataclass(frozen=True)
class Classification:
    label: Label
    match: BestMatch
    delta: float
    xi: float


def classify(
    rec: ObstacleRecord,
    prev_chain: Sequence[ObstacleRecord],
    r: float,
    th: RecognitionThresholds = RecognitionThresholds(),
    y_delta: float = 0.5,
    y_eta: float = 0.5,
) -> Classification:
    m = max_spatial_correlation(rec, prev_chain, r, y_delta, y_eta)
    if m.match_id is None:
        return Classification(Label.NEW, m, math.inf, 0.0)
    prev = next(p for p in prev_chain if p.id == m.match_id)
    xi = coincidence(rec.area, prev.area)
    return Classification(decide(m.sigma_max, m.score.delta, xi, th), m, m.score.delta, xi)


@dataclass(frozen=True)
class MotionEstimate:
    v: float
    alpha: float
    d: float
    zero_displacement: bool = False

    @property
    def velocity(self) -> tuple[float, float]:
        """(vx, vy) in mm/s; alpha is measured from +y towards +x."""
        a = math.radians(self.alpha)
        return self.v * math.sin(a), self.v * math.cos(a)


def estimate_motion(pos_t: GlobalPoint, pos_prev: GlobalPoint, T: float) -> MotionEstimate:
    """Speed, direction and displacement between two scans ``T`` seconds apart."""
    if T <= 0:
        raise ValueError("T must be positive")
    dx = pos_t.x - pos_prev.x
    dy = pos_t.y - pos_prev.y
    if dx == 0.0 and dy == 0.0:
        return MotionEstimate(0.0, 0.0, 0.0, zero_displacement=True)
    d = math.hypot(dx, dy)
    return MotionEstimate(d / T, normalize_deg(math.degrees(math.atan2(dx, dy))), d)


def motion_from_velocity(vx: float, vy: float, T: float) -> MotionEstimate:
    v = math.hypot(vx, vy)
    if v == 0.0:
        return MotionEstimate(0.0, 0.0, 0.0, zero_displacement=True)
    return MotionEstimate(v, normalize_deg(math.degrees(math.atan2(vx, vy))), v * T)


# --------------------------------------------------------------------------
# tracking across ticks


@dataclass
class Track:
    id: int
    history: deque
    moving: bool = False
    velocity: tuple[float, float] = (0.0, 0.0)
    age: int = 0
    # last tick with scan evidence of motion (a cell vacated or newly entered)
    evidence: Optional[int] = None


@dataclass(frozen=True)
class Observation:
    """One obstacle of the current chain after recognition."""

    record: ObstacleRecord
    track_id: int
    label: Label
    sigma_max: float
    delta: float
    xi: float
    match_id: Optional[int]
    # single-period estimate between matched centres (None for new tracks)
    motion: Optional[MotionEstimate]
    # windowed track velocity used for prediction; zero unless ``moving``
    velocity: tuple[float, float]
    moving: bool
    age: int

    @property
    def speed(self) -> float:
        return math.hypot(*self.velocity)


@dataclass
class Tracker:
    """Carries obstacle identity from one scan to the next.

    Each record is matched to the previous record of maximal spatial
    correlation. A track becomes ``moving`` once the decision tree labels it
    dynamic or its centre has drifted ``promote_cells`` grid edges over the
    history window, and drops back once a full window passes with less drift.
    Its velocity is the least-squares slope of the centre history over at
    most ``window`` periods.

    When the caller passes the mask of cells the scan saw through, promotion
    also needs evidence within the window that the obstacle really moved: a
    cell it occupied is now seen free, or a cell seen free on the previous
    scan is now struck. A static block seen from a new angle shifts its
    centre but never produces either.
    """

    r: float
    T: float
    thresholds: RecognitionThresholds = field(default_factory=RecognitionThresholds)
    y_delta: float = 0.5
    y_eta: float = 0.5
    window: int = 20
    promote_cells: float = 1.0
    prev_records: list = field(default_factory=list)
    prev_track: dict = field(default_factory=dict)
    tracks: dict = field(default_factory=dict)
    prev_free: Optional[np.ndarray] = None
    _next_id: int = 0

    def reset(self):
        self.prev_free = None
        self.prev_records = []
        self.prev_track = {}
        self.tracks = {}
        self._next_id = 0

    def _new_track(self, tick: int, z: GlobalPoint) -> Track:
        t = Track(self._next_id, deque([(tick, z.x, z.y)], maxlen=self.window + 1))
        self._next_id += 1
        return t

    def update(
        self, records: Sequence[ObstacleRecord], tick: int, free: Optional[np.ndarray] = None
    ) -> list[Observation]:
        prev_by_id = {p.id: p for p in self.prev_records}
        claims = []
        for rec in records:
            c = classify(rec, self.prev_records, self.r, self.thresholds, self.y_delta, self.y_eta)
            claims.append(c)

        # a previous track goes to the current record that correlates best with it
        owner: dict[int, int] = {}
        for i, c in enumerate(claims):
            if c.label is Label.NEW or c.match.match_id is None:
                continue
            j = c.match.match_id
            if j not in owner or c.match.sigma_max > claims[owner[j]].match.sigma_max:
                owner[j] = i

        out = []
        new_tracks = {}
        next_prev = []
        next_track = {}
        for i, (rec, c) in enumerate(zip(records, claims)):
            j = c.match.match_id
            motion = None
            if c.label is not Label.NEW and j is not None and owner.get(j) == i:
                prev = prev_by_id[j]
                track = self.tracks[self.prev_track[j]]
                track.history.append((tick, rec.center.x, rec.center.y))
                track.age += 1
                motion = estimate_motion(rec.center, prev.center, self.T)
                if free is None or _moved(prev.cells, rec.cells, free, self.prev_free):
                    track.evidence = tick
            else:
                track = self._new_track(tick, rec.center)
            self._refresh(track, tick, c.label is Label.DYNAMIC)
            new_tracks[track.id] = track
            speed = math.hypot(*track.velocity) if track.moving else 0.0
            rec = rec.with_(xi=c.xi if j is not None else 0.0, speed=speed)
            next_prev.append(rec)
            next_track[rec.id] = track.id
            out.append(
                Observation(
                    record=rec,
                    track_id=track.id,
                    label=c.label,
                    sigma_max=c.match.sigma_max,
                    delta=c.delta,
                    xi=c.xi,
                    match_id=j,
                    motion=motion,
                    velocity=track.velocity if track.moving else (0.0, 0.0),
                    moving=track.moving,
                    age=track.age,
                )
            )
        self.tracks = new_tracks
        self.prev_free = free
        self.prev_records = next_prev
        self.prev_track = next_track
        return out

    def _refresh(self, track: Track, tick: int, dynamic: bool = False):
        h = track.history
        if len(h) < 2:
            track.velocity = (0.0, 0.0)
            return
        ts = np.array([e[0] for e in h], dtype=float) * self.T
        xs = np.array([e[1] for e in h])
        ys = np.array([e[2] for e in h])
        tc = ts - ts.mean()
        den = float(np.dot(tc, tc))
        vx = float(np.dot(tc, xs - xs.mean()) / den)
        vy = float(np.dot(tc, ys - ys.mean()) / den)
        track.velocity = (vx, vy)
        drift = math.hypot(xs[-1] - xs[0], ys[-1] - ys[0]) / self.r
        recent = track.evidence is not None and tick - track.evidence <= self.window
        if (dynamic or drift >= self.promote_cells) and recent:
            track.moving = True
        elif drift < self.promote_cells and len(h) == h.maxlen:
            # a whole window without a cell of drift: the obstacle has stopped
            track.moving = False


def _moved(prev_cells, cells, free: np.ndarray, prev_free: Optional[np.ndarray]) -> bool:
    w, h = free.shape
    for gx, gy in prev_cells:
        if (gx, gy) not in cells and 0 <= gx < w and 0 <= gy < h and free[gx, gy]:
            return True
    if prev_free is not None:
        for gx, gy in cells:
            if 0 <= gx < w and 0 <= gy < h and prev_free[gx, gy]:
                return True
    return False
