import math

import pytest
from hypothesis import settings

from gridnav.analysis import Box, ObstacleRecord
from gridnav.geometry import GlobalPoint
from gridnav.harness.runner import builtin, execute, scenarios_dir
from gridnav.recognition import Label, Observation

SUITE = tuple("abcdefgh")
LARGE = ("static-field", "instant-dynamic", "mixed", "multi-obstacle")

# first calls into the jitted kernels pay compile or cache-load time
settings.register_profile("gridnav", deadline=None)
settings.load_profile("gridnav")


def make_obs(center, box, velocity=(0.0, 0.0), track_id=0, moving=None, cells=frozenset()):
    """An Observation built by hand, bypassing the scan pipeline."""
    b = Box(*box)
    if moving is None:
        moving = math.hypot(*velocity) > 0
    rec = ObstacleRecord(0, GlobalPoint(*center), b, 0.0, 0.0, b, cells=frozenset(cells))
    return Observation(rec, track_id, Label.DYNAMIC if moving else Label.STATIC, 1.0, 0.0, 1.0, 0, None,
                       tuple(velocity), moving, 5)


class _Runs(dict):
    """Shipped scenarios, each run once per session on first use."""

    def __missing__(self, name):
        sc = builtin(name)
        res, head, metrics = execute(sc)
        self[name] = (sc, res, metrics)
        return self[name]


@pytest.fixture(scope="session")
def runs():
    return _Runs()


@pytest.fixture(scope="session")
def shipped_names():
    return sorted(p.stem for p in scenarios_dir().glob("*.yaml"))


_ACCEPTANCE: dict[int, str] = {}


@pytest.fixture(scope="session")
def acceptance_log():
    return _ACCEPTANCE


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_ACCEPTANCE):
        terminalreporter.write_line(_ACCEPTANCE[n])
