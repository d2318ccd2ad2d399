import math

import pytest

from gridnav.geometry import GlobalPoint, GridCoord, Pose
from gridnav.navigator import Mode, NavParams, Navigator, Outcome, run
from gridnav.world import ObstacleScript, WorldConfig


def morphin_ticks(res):
    return [r.tick for r in res.reports if r.planner is not None and r.planner.chosen is not None]


def test_empty_world_120_ticks(runs):
    _, res, _ = runs["a"]
    assert res.outcome is Outcome.REACHED
    assert res.ticks == 120
    assert all(abs(p.y - 3000) < 1e-9 for p in res.trajectory)
    assert not morphin_ticks(res)


def test_progress_when_following(runs):
    _, res, _ = runs["a"]
    tgt = GlobalPoint(7000, 3000)
    d = [GlobalPoint(p.x, p.y).dist(tgt) for p in res.trajectory]
    assert all(b < a for a, b in zip(d, d[1:]))


def test_static_obstacle_costs_time(runs):
    _, a, _ = runs["a"]
    _, b, _ = runs["b"]
    assert b.outcome is Outcome.REACHED
    assert morphin_ticks(b)
    assert b.ticks > a.ticks


def test_simultaneous_crossing_waits(runs):
    _, e, _ = runs["e"]
    assert e.outcome is Outcome.REACHED
    assert any(r.mode == Mode.WAITING.value for r in e.reports)
    assert not morphin_ticks(e)


def test_head_on_switches_heading_same_tick(runs):
    _, f, _ = runs["f"]
    rep = next(r for r in f.reports if r.planner is not None and r.planner.chosen is not None)
    chosen = rep.planner.candidates[rep.planner.chosen]
    want = math.degrees(math.atan2(chosen.endpoint.y - rep.pose.y, chosen.endpoint.x - rep.pose.x))
    assert rep.pose.theta == pytest.approx(want % 360, abs=1e-6)
    assert rep.mode == Mode.DETOUR.value


def test_mixed_h_waits_and_detours(runs):
    _, h, _ = runs["h"]
    assert h.outcome is Outcome.REACHED
    modes = {r.mode for r in h.reports}
    assert Mode.WAITING.value in modes and Mode.DETOUR.value in modes


def test_detours_end(runs):
    for name in "bfh":
        _, res, _ = runs[name]
        assert res.reports[-1].mode == Mode.FOLLOW.value


def test_planner_record_only_on_replan(runs):
    for name in "bcdefgh":
        _, res, _ = runs[name]
        for r in res.reports:
            assert (r.planner is not None) == (r.verdict == "Replan")


def test_trajectory_grows_one_per_tick(runs):
    _, res, _ = runs["g"]
    assert len(res.trajectory) == res.ticks + 1
    assert [r.tick for r in res.reports] == list(range(res.ticks))


def small(**kw):
    base = dict(grid_w=12, grid_h=7, robot_start=Pose(500, 1500, 0), target=GridCoord(10, 3))
    base.update(kw)
    return WorldConfig(**base)


def test_timeout():
    res = run(small(), [], max_ticks=10)
    assert res.outcome is Outcome.TIMEOUT and res.ticks == 10


def test_boxed_in_gives_no_feasible_path():
    # one-cell corridor between full-height walls
    walls = [ObstacleScript("W1", (2, 0, 2, 6)), ObstacleScript("W2", (0, 0, 0, 6))]
    res = Navigator(small(), NavParams(stuck_limit=5)).run(walls, 400)
    assert res.outcome is Outcome.NO_PATH
    assert res.collisions == 0
    tail = res.reports[-5:]
    assert all(r.planner is not None and r.planner.chosen is None for r in tail)
    assert all(r.speed == 0 for r in tail)


def test_bad_max_ticks():
    with pytest.raises(ValueError):
        run(small(), [], max_ticks=0)
