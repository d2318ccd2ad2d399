import os
import subprocess
import sys

import pytest

from gridnav import kernels


def run_py(code: str, disable: bool) -> str:
    env = dict(os.environ, GRIDNAV_DISABLE_JIT="1" if disable else "")
    return subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True).stdout


def test_env_switch_selects_backend():
    code = "from gridnav import kernels; print(kernels.BACKEND)"
    assert run_py(code, True).strip() == "numpy"
    if kernels.HAVE_NUMBA:
        assert run_py(code, False).strip() == "numba"


@pytest.mark.skipif(not kernels.HAVE_NUMBA, reason="numba missing")
def test_traces_identical_across_backends(tmp_path):
    code = (
        "import sys\n"
        "from gridnav.harness.runner import run_file, scenarios_dir\n"
        "run = run_file(scenarios_dir() / 'h.yaml', sys.argv[1], plot_format='none')\n"
    )
    outs = []
    for disable in (False, True):
        d = tmp_path / ("numpy" if disable else "numba")
        env = dict(os.environ, GRIDNAV_DISABLE_JIT="1" if disable else "")
        subprocess.run([sys.executable, "-c", code, str(d)], env=env, check=True)
        outs.append((d / "h.trace.jsonl").read_bytes())
    assert outs[0] == outs[1]
