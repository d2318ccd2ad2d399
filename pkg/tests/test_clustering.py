import math

import numpy as np
import pytest

from gridnav import kernels
from gridnav.clustering import Cluster, cluster_scan, merge_touching, threshold
from gridnav.geometry import N_BEAMS, Pose
from gridnav.world import LaserScan

SIN_HALF = math.sin(math.radians(0.5))


def make_scan(beams: dict, origin=Pose(0, 0, 90), max_range=4000.0) -> LaserScan:
    ranges = np.full(N_BEAMS, max_range)
    no_ret = np.ones(N_BEAMS, dtype=bool)
    for i, rho in beams.items():
        ranges[i] = rho
        no_ret[i] = False
    return LaserScan(origin, ranges, no_ret, max_range)


def reference_clusters(beams: dict, origin: Pose, lam: float, limit: float):
    """Plain loop over beams 0..360, written from the rule alone."""
    out = []
    prev = None
    for i in range(N_BEAMS):
        rho = beams.get(i)
        if rho is None or rho > limit:
            prev = None
            continue
        a = math.radians(origin.theta - 0.5 * i)
        p = (origin.x + rho * math.cos(a), origin.y + rho * math.sin(a))
        if prev is not None and math.dist(p, prev) <= lam * rho * SIN_HALF:
            out[-1].append(i)
        else:
            out.append([i])
        prev = p
    return out


def test_threshold_values():
    assert threshold(0, 1.2) == 0
    assert threshold(4000, 1.2) == pytest.approx(41.888, abs=1e-3)
    assert threshold(1000, 1.2) == pytest.approx(10.472, abs=1e-3)


def chord(r1, r2):
    a = math.radians(0.5)
    return math.hypot(r2 * math.cos(a) - r1, r2 * math.sin(a))


def test_join_1000_1005():
    # exact chord is 10.076 mm; still below the 10.47 mm threshold
    assert chord(1000, 1005) == pytest.approx(10.08, abs=0.01)
    assert chord(1000, 1005) <= threshold(1005, 1.2)
    chain = cluster_scan(make_scan({100: 1000.0, 101: 1005.0}), 1.2, 8, 500)
    assert [c.indices.tolist() for c in chain] == [[100, 101]]


def test_split_1000_1030():
    assert chord(1000, 1030) == pytest.approx(31.2, abs=0.1)
    assert chord(1000, 1030) > threshold(1030, 1.2)
    chain = cluster_scan(make_scan({100: 1000.0, 101: 1030.0}), 1.2, 8, 500)
    assert [c.indices.tolist() for c in chain] == [[100], [101]]


def test_empty_and_far_beams():
    assert cluster_scan(make_scan({}), 1.2, 8, 500) == []
    assert cluster_scan(make_scan({10: 4001.0}, max_range=5000.0), 1.2, 8, 500) == []


def test_gap_always_splits():
    chain = cluster_scan(make_scan({50: 1000.0, 52: 1000.0}), 1.2, 8, 500)
    assert len(chain) == 2


def test_equal_range_pairs_join():
    assert 2 * math.sin(math.radians(0.25)) < 1.2 * SIN_HALF
    for rho in (10.0, 500.0, 3999.0):
        chain = cluster_scan(make_scan({200: rho, 201: rho}), 1.2, 8, 500)
        assert len(chain) == 1


def test_random_scans_match_reference():
    rng = np.random.default_rng(2024)
    origin = Pose(1234.0, -56.0, 133.0)
    for _ in range(1000):
        n = int(rng.integers(0, 17))
        start = int(rng.integers(0, N_BEAMS - 40))
        idx = np.sort(rng.choice(np.arange(start, start + 40), size=n, replace=False))
        base = rng.uniform(300, 3900)
        beams = {int(i): float(np.clip(base + rng.normal(0, 15), 1, 4100)) for i in idx}
        sc = make_scan(beams, origin, 4000.0)
        sc.ranges[sc.ranges > 4000.0] = 4000.0
        beams = {i: min(r, 4000.0) for i, r in beams.items()}
        got = [c.indices.tolist() for c in cluster_scan(sc, 1.2, 8, 500)]
        assert got == reference_clusters(beams, origin, 1.2, 4000.0)


def test_cluster_label_backends_agree():
    if kernels.cluster_labels_jit is None:
        pytest.skip("numba missing")
    rng = np.random.default_rng(5)
    for _ in range(50):
        rho = rng.uniform(100, 4000, N_BEAMS)
        a = np.radians(rng.uniform(0, 360) - np.arange(N_BEAMS) * 0.5)
        keep = rng.random(N_BEAMS) < 0.8
        x, y = rho * np.cos(a), rho * np.sin(a)
        np.testing.assert_array_equal(
            kernels.cluster_labels_numpy(x, y, rho, keep, 1.2, SIN_HALF),
            kernels.cluster_labels_jit(x, y, rho, keep, 1.2, SIN_HALF),
        )


def test_merge_touching_joins_adjacent_fragments():
    origin = Pose(0, 0, 90)
    # two beam runs that land in neighbouring cells of one block
    a = Cluster(np.array([170, 171]), np.array([1510.0, 1510.0]))
    b = Cluster(np.array([172, 173]), np.array([1700.0, 1700.0]))
    merged = merge_touching([a, b], origin, 500)
    assert len(merged) == 1
    assert merged[0].indices.tolist() == [170, 171, 172, 173]
    # a skipped beam keeps them apart
    c = Cluster(np.array([175]), np.array([1700.0]))
    assert len(merge_touching([a, c], origin, 500)) == 2
