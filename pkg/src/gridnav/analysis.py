"""Per-cluster attributes and frame-to-frame matching algebra.

A record's area is a grid-cell bounding box. Overlap, coincidence and
spatial correlation are computed purely from box bounds.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

import numpy as np

from .clustering import Cluster
from .geometry import GlobalPoint, GridCoord, Pose, global_to_grid, polar_to_global_xy


@dataclass(frozen=True, order=True)
class Box:
    """Inclusive grid-cell rectangle."""

    x0: int
    y0: int
    x1: int
    y1: int

    @classmethod
    def from_corners(cls, a: GridCoord, b: GridCoord) -> "Box":
        return cls(min(a.gx, b.gx), min(a.gy, b.gy), max(a.gx, b.gx), max(a.gy, b.gy))

    @property
    def cells(self) -> int:
        return (self.x1 - self.x0 + 1) * (self.y1 - self.y0 + 1)

    def contains(self, gx: int, gy: int) -> bool:
        return self.x0 <= gx <= self.x1 and self.y0 <= gy <= self.y1

    def inflate(self, k: int) -> "Box":
        return Box(self.x0 - k, self.y0 - k, self.x1 + k, self.y1 + k)

    def union_bounds(self, other: "Box") -> "Box":
        return Box(min(self.x0, other.x0), min(self.y0, other.y0), max(self.x1, other.x1), max(self.y1, other.y1))

    def as_list(self) -> list[int]:
        return [self.x0, self.y0, self.x1, self.y1]


@dataclass(frozen=True)
class ObstacleRecord:
    id: int
    center: GlobalPoint
    area: Box
    mean_alpha: float
    mean_rho: float
    # bounding box of the grid cells of every beam hit in the cluster
    extent: Box
    xi: float = 0.0
    speed: float = 0.0
    n_beams: int = 0
    # the struck grid cells themselves
    cells: frozenset = frozenset()

    def with_(self, **kw) -> "ObstacleRecord":
        return replace(self, **kw)


@dataclass(frozen=True)
class MatchScore:
    delta: float
    eta: float
    sigma: float
    y_delta: float = 0.5
    y_eta: float = 0.5


def center(cluster: Cluster, robot: Pose) -> GlobalPoint:
    """Mean angle and mean range of the cluster, mapped to the global frame.

    ``robot`` is the frame the beam angles are measured in (the scan origin).
    """
    if cluster.n < 1:
        raise ValueError("empty cluster")
    a = float(np.mean(cluster.alphas))
    p = float(np.mean(cluster.rhos))
    return polar_to_global_xy(robot, p, a)


def grid_area(cluster: Cluster, robot: Pose, r: float) -> Box:
    """Box spanned by the grid cells of (min rho, min alpha) and (max rho, max alpha)."""
    if cluster.n < 1:
        raise ValueError("empty cluster")
    a = cluster.alphas
    lo = polar_to_global_xy(robot, float(cluster.rhos.min()), float(a.min()))
    hi = polar_to_global_xy(robot, float(cluster.rhos.max()), float(a.max()))
    return Box.from_corners(global_to_grid(lo, r), global_to_grid(hi, r))


def hit_cells(cluster: Cluster, robot: Pose, r: float) -> tuple[np.ndarray, np.ndarray]:
    a = np.radians(robot.theta - cluster.alphas)
    gx = np.floor((robot.x + cluster.rhos * np.cos(a)) / r + 0.5).astype(int)
    gy = np.floor((robot.y + cluster.rhos * np.sin(a)) / r + 0.5).astype(int)
    return gx, gy


def point_extent(cluster: Cluster, robot: Pose, r: float) -> Box:
    gx, gy = hit_cells(cluster, robot, r)
    return Box(int(gx.min()), int(gy.min()), int(gx.max()), int(gy.max()))


def analyze(cluster: Cluster, robot: Pose, r: float, rec_id: int = 0) -> ObstacleRecord:
    z = center(cluster, robot)
    return ObstacleRecord(
        id=rec_id,
        center=z,
        area=grid_area(cluster, robot, r),
        mean_alpha=float(np.mean(cluster.alphas)),
        mean_rho=float(np.mean(cluster.rhos)),
        extent=point_extent(cluster, robot, r),
        n_beams=cluster.n,
        cells=frozenset(zip(*(v.tolist() for v in hit_cells(cluster, robot, r)))),
    )


def analyze_chain(chain: Sequence[Cluster], robot: Pose, r: float) -> list[ObstacleRecord]:
    return [analyze(c, robot, r, i) for i, c in enumerate(chain)]


def overlap(a: Box, b: Box) -> tuple[int, int]:
    """(intersection, union) cell counts of box ``a`` (time t) and ``b`` (time t-1)."""
    if b.x1 < a.x0 or b.x0 > a.x1 or b.y1 < a.y0 or b.y0 > a.y1:
        return 0, a.cells + b.cells
    xb = sorted((a.x0, a.x1, b.x0, b.x1))
    yb = sorted((a.y0, a.y1, b.y0, b.y1))
    inter = (xb[2] - xb[1] + 1) * (yb[2] - yb[1] + 1)
    return inter, a.cells + b.cells - inter


def overlap_counts(a, b) -> tuple[np.ndarray, np.ndarray]:
    """``overlap`` over arrays of (x0, y0, x1, y1) rows; the two inputs broadcast."""
    a, b = np.broadcast_arrays(np.asarray(a, dtype=np.int64), np.asarray(b, dtype=np.int64))
    xb = np.sort(np.stack([a[..., 0], a[..., 2], b[..., 0], b[..., 2]], axis=-1), axis=-1)
    yb = np.sort(np.stack([a[..., 1], a[..., 3], b[..., 1], b[..., 3]], axis=-1), axis=-1)
    apart = (b[..., 2] < a[..., 0]) | (b[..., 0] > a[..., 2]) | (b[..., 3] < a[..., 1]) | (b[..., 1] > a[..., 3])
    inter = np.where(apart, 0, (xb[..., 2] - xb[..., 1] + 1) * (yb[..., 2] - yb[..., 1] + 1))
    na = (a[..., 2] - a[..., 0] + 1) * (a[..., 3] - a[..., 1] + 1)
    nb = (b[..., 2] - b[..., 0] + 1) * (b[..., 3] - b[..., 1] + 1)
    return inter, na + nb - inter


def coincidence(a: Box, b: Box) -> float:
    inter, _ = overlap(a, b)
    return inter / a.cells


def correlation(delta: float, eta: float, y_delta: float = 0.5, y_eta: float = 0.5) -> float:
    return y_delta / (delta + 1.0) + y_eta / (eta + 1.0)


def spatial_correlation(
    a: ObstacleRecord, b: ObstacleRecord, r: float, y_delta: float = 0.5, y_eta: float = 0.5, counts=None
) -> MatchScore:
    """Correlation of record ``a`` (t) with ``b`` (t-1); centre distance in grid edges.

    ``counts`` is an already computed (intersection, union) pair for the areas.
    """
    if y_delta < 0 or y_eta < 0:
        raise ValueError("weights must be non-negative")
    delta = a.center.dist(b.center) / r
    inter, union = counts if counts is not None else overlap(a.area, b.area)
    eta = 1.0 - inter / union
    return MatchScore(delta, eta, correlation(delta, eta, y_delta, y_eta), y_delta, y_eta)


@dataclass(frozen=True)
class BestMatch:
    sigma_max: float
    match_id: Optional[int]
    score: Optional[MatchScore] = field(default=None)


def max_spatial_correlation(
    a: ObstacleRecord, prev_chain: Sequence[ObstacleRecord], r: float, y_delta: float = 0.5, y_eta: float = 0.5
) -> BestMatch:
    best = BestMatch(0.0, None)
    prev = sorted(prev_chain, key=lambda rec: rec.id)
    if not prev:
        return best
    inter, union = overlap_counts(a.area.as_list(), [b.area.as_list() for b in prev])
    for b, i, u in zip(prev, inter.tolist(), union.tolist()):
        s = spatial_correlation(a, b, r, y_delta, y_eta, (i, u))
        if best.match_id is None or s.sigma > best.sigma_max:
            best = BestMatch(s.sigma, b.id, s)
    return best

