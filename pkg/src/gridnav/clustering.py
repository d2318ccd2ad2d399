"""Adaptive-threshold nearest-neighbour clustering of one laser scan."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .geometry import BEAM_STEP_DEG, N_BEAMS, PolarBeam
from .world import LaserScan

SIN_STEP = math.sin(math.radians(BEAM_STEP_DEG))


def threshold(rho: float, lam: float) -> float:
    """Split distance for a beam of length ``rho``: ``lam * rho * sin(0.5 deg)``."""
    return lam * rho * SIN_STEP


@dataclass(frozen=True)
class Cluster:
    indices: np.ndarray
    rhos: np.ndarray

    @property
    def n(self) -> int:
        return len(self.indices)

    @property
    def alphas(self) -> np.ndarray:
        return self.indices * BEAM_STEP_DEG

    @property
    def beams(self) -> list[PolarBeam]:
        return [PolarBeam(int(i), float(p)) for i, p in zip(self.indices, self.rhos)]


ObstacleChain = list  # ordered list[Cluster], by starting beam index


def retained_mask(scan: LaserScan, r_w: int, r: float) -> np.ndarray:
    return (~scan.no_return) & (scan.ranges <= r_w * r)


def cluster_scan(scan: LaserScan, lam: float, r_w: int, r: float) -> ObstacleChain:
    if len(scan.ranges) != N_BEAMS:
        raise ValueError(f"expected {N_BEAMS} beams, got {len(scan.ranges)}")
    keep = retained_mask(scan, r_w, r)
    x, y = scan.points()
    labels = kernels.cluster_labels(x, y, scan.ranges, keep, float(lam), SIN_STEP)
    return chain_from_labels(labels, scan.ranges)


def chain_from_labels(labels: np.ndarray, ranges: np.ndarray) -> ObstacleChain:
    idx = np.flatnonzero(labels >= 0)
    if idx.size == 0:
        return []
    cuts = np.flatnonzero(np.diff(labels[idx])) + 1
    return [Cluster(part, ranges[part].copy()) for part in np.split(idx, cuts)]


def _hit_cells(c: Cluster, origin, r: float) -> np.ndarray:
    a = np.radians(origin.theta - c.alphas)
    gx = np.floor((origin.x + c.rhos * np.cos(a)) / r + 0.5)
    gy = np.floor((origin.y + c.rhos * np.sin(a)) / r + 0.5)
    return np.stack([gx, gy], axis=1).astype(np.int64)


def merge_touching(chain: ObstacleChain, origin, r: float) -> ObstacleChain:
    """Join neighbouring clusters that belong to the same grid obstacle.

    A face seen at a grazing angle has beam-to-beam jumps above the adaptive
    threshold, so one obstacle can come back as many clusters. Two clusters
    are joined when they are adjacent in beam index (no skipped beam between
    them) and some struck cell of one is 8-connected to a struck cell of the
    other. The result is still a partition into contiguous beam runs.
    """
    if not chain:
        return []
    out = [chain[0]]
    prev_cells = _hit_cells(chain[0], origin, r)
    for c in chain[1:]:
        cells = _hit_cells(c, origin, r)
        last = out[-1]
        adjacent = int(c.indices[0]) == int(last.indices[-1]) + 1
        touching = adjacent and bool(
            (np.abs(cells[:, None, :] - prev_cells[None, :, :]).max(axis=2) <= 1).any()
        )
        if touching:
            out[-1] = Cluster(np.concatenate([last.indices, c.indices]), np.concatenate([last.rhos, c.rhos]))
            prev_cells = np.concatenate([prev_cells, cells])
        else:
            out.append(c)
            prev_cells = cells
    return out
