import math

import pytest

from gridnav.geometry import (
    GlobalPoint,
    GridCoord,
    PolarBeam,
    Pose,
    global_to_grid,
    grid_center,
    normalize_deg,
    polar_to_global,
    to_grid,
)


@pytest.mark.parametrize(
    "robot, beam, expect",
    [
        (Pose(0, 0, 90), PolarBeam(180, 1000), (1000.0, 0.0)),
        (Pose(0, 0, 90), PolarBeam(0, 1000), (0.0, 1000.0)),
        (Pose(100, 200, 45), PolarBeam(30, 500), (533.0127, 450.0)),
    ],
)
def test_polar_to_global_examples(robot, beam, expect):
    p = polar_to_global(robot, beam)
    assert p.x == pytest.approx(expect[0], abs=1e-3)
    assert p.y == pytest.approx(expect[1], abs=1e-3)


def test_polar_to_global_hand_value():
    # 100 + 500 cos 30, 200 + 500 sin 30, worked by hand
    p = polar_to_global(Pose(100, 200, 45), PolarBeam(30, 500))
    assert p.x == pytest.approx(100 + 250 * math.sqrt(3), abs=1e-9)
    assert p.y == pytest.approx(450.0, abs=1e-9)


@pytest.mark.parametrize("x, g", [(0, 0), (1250, 3), (1249, 2), (-250, 0), (-251, -1), (249.999, 0)])
def test_to_grid_rounds_half_up(x, g):
    assert to_grid(x, 500) == g


def test_global_to_grid_and_back():
    c = global_to_grid(GlobalPoint(1250, -10), 500)
    assert c == GridCoord(3, 0)
    assert grid_center(c, 500) == GlobalPoint(1500, 0)
    with pytest.raises(ValueError):
        global_to_grid(GlobalPoint(0, 0), 0)


def test_beam_validation():
    assert PolarBeam(360, 1.0).alpha == 180.0
    with pytest.raises(ValueError):
        PolarBeam(361, 1.0)
    with pytest.raises(ValueError):
        PolarBeam(0, -1.0)


@pytest.mark.parametrize("a, n", [(0, 0), (360, 0), (-90, 270), (725, 5), (-1e-17, 0)])
def test_normalize(a, n):
    assert normalize_deg(a) == pytest.approx(n)
    assert 0 <= normalize_deg(a) < 360
