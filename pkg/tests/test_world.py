import math

import numpy as np
import pytest

from gridnav import kernels
from gridnav.geometry import GridCoord, Pose
from gridnav.world import (
    ConfigError,
    ObstacleScript,
    RobotCommand,
    RobotOutOfBounds,
    WorldConfig,
    WorldState,
    scan,
    seen_free,
    step,
)


def cfg(**kw):
    base = dict(grid_w=20, grid_h=12, robot_start=Pose(1000, 3000, 0), target=GridCoord(14, 6))
    base.update(kw)
    return WorldConfig(**base)


def slab_entry(ox, oy, dx, dy, cx, cy):
    """Entry parameter of the ray into the closed unit square at (cx, cy), or None."""
    lo, hi = -math.inf, math.inf
    for o, d, c in ((ox, dx, cx), (oy, dy, cy)):
        if d == 0.0:
            if not c <= o <= c + 1:
                return None
            continue
        t0, t1 = (c - o) / d, (c + 1 - o) / d
        lo, hi = max(lo, min(t0, t1)), min(hi, max(t0, t1))
    if lo > hi or hi < 0:
        return None
    return max(lo, 0.0)


def oracle_cast(occ, ox, oy, dx, dy, max_t):
    start = (math.floor(ox), math.floor(oy))
    best = None
    for cy, cx in zip(*np.nonzero(occ)):
        if (cx, cy) == start:
            continue
        t = slab_entry(ox, oy, dx, dy, cx, cy)
        if t is not None and t <= max_t and (best is None or t < best):
            best = t
    return best


def test_step_kinematics():
    w = WorldState.initial(cfg(), [])
    nxt = step(w, RobotCommand(100, 0))
    assert nxt.tick == 1
    assert nxt.robot.x == pytest.approx(1050) and nxt.robot.y == pytest.approx(3000)
    still = step(w, RobotCommand(0, 37))
    assert (still.robot.x, still.robot.y) == (1000, 3000)
    with pytest.raises(ValueError):
        step(w, RobotCommand(-1, 0))


def test_obstacle_moves_450_per_tick():
    s = ObstacleScript("D1", (5, 5, 5, 5), v=450, angle=90)
    for k in range(5):
        ox, oy = s.offset(k + 1, 1.0)
        px, py = s.offset(k, 1.0)
        assert oy - py == pytest.approx(450)
        assert ox - px == pytest.approx(0, abs=1e-9)


def test_spawn_and_despawn():
    s = ObstacleScript("D", (3, 3, 3, 3), spawn_tick=2, despawn_tick=4)
    assert [s.alive(t) for t in range(6)] == [False, False, True, True, False, False]
    with pytest.raises(ConfigError):
        ObstacleScript("D", (3, 3, 2, 3))
    with pytest.raises(ConfigError):
        ObstacleScript("D", (3, 3, 3, 3), spawn_tick=4, despawn_tick=4)


def test_out_of_bounds():
    w = WorldState.initial(cfg(robot_start=Pose(0, 0, 180)), [])
    with pytest.raises(RobotOutOfBounds):
        step(w, RobotCommand(1000, 180))


def test_config_errors():
    with pytest.raises(ConfigError):
        cfg(target=GridCoord(30, 0))
    with pytest.raises(ConfigError):
        cfg(T=0)
    with pytest.raises(ConfigError):
        WorldState.initial(cfg(), [ObstacleScript("A", (1, 1, 1, 1)), ObstacleScript("A", (2, 2, 2, 2))])


def test_empty_world_scan_all_no_return():
    sc = scan(WorldState.initial(cfg(), []))
    assert sc.ranges.shape == (361,)
    assert sc.no_return.all()
    assert np.all(sc.ranges == 4000)


def test_dead_ahead_cell_range():
    c = cfg()
    w = WorldState.initial(c, [ObstacleScript("S", (6, 6, 6, 6))])
    sc = scan(w)
    # alpha 90 in the sensor frame (heading + 90) looks along the heading
    beam = 180
    d = 6 * 500 - 250 - 1000
    assert not sc.no_return[beam]
    assert abs(sc.ranges[beam] - d) <= math.sqrt(2) * 500
    assert sc.ranges[beam] == pytest.approx(d + c.hit_bias)


def test_obstacle_behind_is_invisible():
    w = WorldState.initial(cfg(robot_start=Pose(5000, 3000, 0)), [ObstacleScript("S", (6, 6, 7, 6))])
    assert scan(w).no_return.all()


@pytest.mark.parametrize("impl", ["numpy", "py", "jit"])
def test_raycast_matches_slab_oracle(impl):
    if impl == "jit" and kernels.raycast_jit is None:
        pytest.skip("numba missing")
    cast = {"numpy": kernels.raycast_numpy, "py": kernels._raycast_scalar, "jit": kernels.raycast_jit}[impl]
    rng = np.random.default_rng(7)
    for _ in range(40):
        occ = rng.random((12, 12)) < 0.15
        ox, oy = rng.uniform(1, 11, 2)
        ang = rng.uniform(0, 2 * np.pi, 24)
        dx, dy = np.cos(ang), np.sin(ang)
        t, hit = cast(occ, ox, oy, dx, dy, 8.0)
        for k in range(len(ang)):
            want = oracle_cast(occ, ox, oy, dx[k], dy[k], 8.0)
            assert hit[k] == (want is not None)
            if want is not None:
                assert t[k] == pytest.approx(want, abs=1e-7)


def test_raycast_backends_agree():
    if kernels.raycast_jit is None:
        pytest.skip("numba missing")
    rng = np.random.default_rng(3)
    occ = rng.random((30, 30)) < 0.1
    ang = np.radians(np.arange(361) * 0.5)
    a = kernels.raycast_numpy(occ, 15.3, 14.9, np.cos(ang), np.sin(ang), 8.0)
    b = kernels.raycast_jit(occ, 15.3, 14.9, np.cos(ang), np.sin(ang), 8.0)
    np.testing.assert_array_equal(a[1], b[1])
    np.testing.assert_allclose(a[0], b[0], rtol=0, atol=1e-12)


def test_free_cells_backends_agree():
    if kernels.free_cells_jit is None:
        pytest.skip("numba missing")
    rng = np.random.default_rng(11)
    ang = np.radians(np.arange(361) * 0.5)
    t = rng.uniform(0, 8, 361)
    a = kernels.free_cells_py(25, 20, 10.4, 9.7, np.cos(ang), np.sin(ang), t)
    b = kernels.free_cells_jit(25, 20, 10.4, 9.7, np.cos(ang), np.sin(ang), t)
    np.testing.assert_array_equal(a, b)


def test_seen_free_excludes_struck_cells():
    c = cfg()
    w = WorldState.initial(c, [ObstacleScript("S", (6, 5, 6, 7))])
    free = seen_free(scan(w), c)
    assert free.shape == (20, 12)
    assert free[3, 6] and free[5, 6]
    assert not free[6, 6] and not free[6, 5]
    # nothing beyond the block along the heading
    assert not free[8, 6]
