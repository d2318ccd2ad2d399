import itertools
import math

import numpy as np
import pytest

from gridnav.analysis import (
    overlap_counts,
    Box,
    ObstacleRecord,
    analyze,
    center,
    coincidence,
    correlation,
    grid_area,
    max_spatial_correlation,
    overlap,
    spatial_correlation,
)
from gridnav.clustering import Cluster
from gridnav.geometry import GlobalPoint, GridCoord, Pose, polar_to_global_xy


def cell_set(b: Box) -> set:
    return {(x, y) for x in range(b.x0, b.x1 + 1) for y in range(b.y0, b.y1 + 1)}


def all_boxes(n: int):
    for x0, x1 in itertools.combinations_with_replacement(range(n), 2):
        for y0, y1 in itertools.combinations_with_replacement(range(n), 2):
            yield Box(x0, y0, x1, y1)


def rec(box, cx=0.0, cy=0.0, rid=0):
    b = Box(*box)
    return ObstacleRecord(rid, GlobalPoint(cx, cy), b, 0.0, 0.0, b)


def test_overlap_exhaustive_small_grid():
    # the 10x10 sweep runs in the acceptance suite; a 5x5 one keeps this file quick
    boxes = list(all_boxes(5))
    sets = [cell_set(b) for b in boxes]
    for a, sa in zip(boxes, sets):
        for b, sb in zip(boxes, sets):
            assert overlap(a, b) == (len(sa & sb), len(sa | sb))


def test_overlap_counts_matches_scalar():
    boxes = list(all_boxes(5))
    arr = np.array([b.as_list() for b in boxes])
    inter, union = overlap_counts(arr[:, None, :], arr[None, :, :])
    for i, a in enumerate(boxes):
        for j, b in enumerate(boxes):
            assert (inter[i, j], union[i, j]) == overlap(a, b)


def test_overlap_examples():
    a, b = Box(0, 0, 2, 2), Box(1, 0, 3, 2)
    assert overlap(a, b) == (6, 12)
    assert coincidence(a, b) == pytest.approx(2 / 3)
    assert overlap(a, a) == (9, 9)
    assert coincidence(a, a) == 1.0
    assert overlap(a, Box(4, 0, 5, 2))[0] == 0
    assert coincidence(a, Box(4, 0, 5, 2)) == 0.0


def test_correlation_values():
    assert correlation(0, 0) == 1.0
    assert correlation(4, 1) == pytest.approx(0.35)
    assert correlation(1e12, 1) == pytest.approx(0.25)


def test_spatial_correlation_and_max():
    a = rec((0, 0, 1, 1))
    assert spatial_correlation(a, a, 500).sigma == 1.0
    far = rec((10, 10, 10, 10), 2000.0, 0.0, rid=3)
    near = rec((0, 0, 1, 0), 0.0, 250.0, rid=7)
    s_far = spatial_correlation(a, far, 500)
    assert s_far.sigma == pytest.approx(0.5 / 5 + 0.5 / 2)
    best = max_spatial_correlation(a, [far, near], 500)
    assert best.match_id == 7
    assert best.sigma_max == pytest.approx(spatial_correlation(a, near, 500).sigma)
    empty = max_spatial_correlation(a, [], 500)
    assert empty.sigma_max == 0.0 and empty.match_id is None
    with pytest.raises(ValueError):
        spatial_correlation(a, a, 500, -1.0)


def test_center_two_beams():
    robot = Pose(0, 0, 90)
    c = Cluster(np.array([20, 22]), np.array([1000.0, 1200.0]))
    z = center(c, robot)
    want = polar_to_global_xy(robot, 1100.0, 10.5)
    assert (z.x, z.y) == pytest.approx((want.x, want.y))


def test_center_symmetric_on_heading():
    robot = Pose(0, 0, 90)
    c = Cluster(np.array([170, 180, 190]), np.array([1500.0, 1500.0, 1500.0]))
    z = center(c, robot)
    assert z.y == pytest.approx(0.0, abs=1e-9)
    assert z.x > 0


def test_single_beam_area_and_record():
    robot = Pose(0, 0, 90)
    c = Cluster(np.array([180]), np.array([1501.0]))
    r = analyze(c, robot, 500)
    assert r.area == Box(3, 0, 3, 0) and r.area.cells == 1
    assert r.extent == r.area
    assert r.cells == frozenset({(3, 0)})


def test_box_from_corners():
    b = Box.from_corners(GridCoord(4, 5), GridCoord(2, 3))
    assert b == Box(2, 3, 4, 5) and b.cells == 9


def test_grid_area_spans_corner_beams():
    robot = Pose(0, 0, 90)
    c = Cluster(np.array([160, 161, 162]), np.array([1000.0, 1020.0, 2100.0]))
    b = grid_area(c, robot, 500)
    lo = polar_to_global_xy(robot, 1000.0, 80.0)
    hi = polar_to_global_xy(robot, 2100.0, 81.0)
    assert b == Box.from_corners(
        GridCoord(math.floor(lo.x / 500 + 0.5), math.floor(lo.y / 500 + 0.5)),
        GridCoord(math.floor(hi.x / 500 + 0.5), math.floor(hi.y / 500 + 0.5)),
    )
