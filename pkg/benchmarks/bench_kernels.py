"""Compare the numba kernels against their numpy/python fallbacks.

    python3 benchmarks/bench_kernels.py [--repeat N] [--scenario NAME]

Each kernel is timed on identical inputs with both backends, after one
warm-up call so numba compilation is not counted. The end-to-end timing runs
one shipped scenario in a fresh interpreter with and without
``GRIDNAV_DISABLE_JIT``.
"""
from __future__ import annotations

import argparse
import os
import subprocess
import sys
import time

import numpy as np

from gridnav import kernels
from gridnav.geometry import BEAM_STEP_DEG, N_BEAMS


def best_of(fn, repeat: int) -> float:
    fn()
    best = float("inf")
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t)
    return best


def inputs(seed: int = 0):
    rng = np.random.default_rng(seed)
    occ = rng.random((40, 40)) < 0.08
    occ[20, 20] = False
    ang = np.radians(np.arange(N_BEAMS) * BEAM_STEP_DEG)
    dx, dy = np.cos(ang), np.sin(ang)
    rho = rng.uniform(500, 4000, N_BEAMS)
    x, y = rho * np.cos(ang), rho * np.sin(ang)
    keep = rng.random(N_BEAMS) < 0.7
    t = rng.uniform(0.5, 8.0, N_BEAMS)
    return occ, dx, dy, rho, x, y, keep, t


def kernel_rows(repeat: int):
    if kernels.raycast_jit is None:
        print("numba is not importable; only the fallback kernels exist")
        return []
    occ, dx, dy, rho, x, y, keep, t = inputs()
    cases = {
        "raycast": (
            lambda: kernels.raycast_numpy(occ, 20.5, 20.5, dx, dy, 8.0),
            lambda: kernels.raycast_jit(occ, 20.5, 20.5, dx, dy, 8.0),
        ),
        "cluster_labels": (
            lambda: kernels.cluster_labels_numpy(x, y, rho, keep, 1.2, np.sin(np.radians(0.5))),
            lambda: kernels.cluster_labels_jit(x, y, rho, keep, 1.2, np.sin(np.radians(0.5))),
        ),
        "traverse": (
            lambda: kernels.traverse_py(0.3, 0.7, 37.9, 22.1),
            lambda: kernels.traverse_jit(0.3, 0.7, 37.9, 22.1),
        ),
        "free_cells": (
            lambda: kernels.free_cells_py(40, 40, 20.5, 20.5, dx, dy, t),
            lambda: kernels.free_cells_jit(40, 40, 20.5, 20.5, dx, dy, t),
        ),
    }
    rows = []
    for name, (slow, fast) in cases.items():
        a, b = best_of(slow, repeat), best_of(fast, repeat)
        rows.append((name, a, b))
    return rows


def end_to_end(scenario: str) -> dict:
    code = (
        "import time\n"
        "from gridnav.harness.runner import builtin, execute\n"
        f"sc = builtin({scenario!r})\n"
        "execute(sc)\n"
        "t = time.perf_counter(); execute(sc); print(time.perf_counter() - t)\n"
    )
    out = {}
    for label, flag in (("numba", ""), ("numpy", "1")):
        env = dict(os.environ, GRIDNAV_DISABLE_JIT=flag)
        res = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
        out[label] = float(res.stdout.strip().splitlines()[-1])
    return out


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=20)
    ap.add_argument("--scenario", default="mixed")
    args = ap.parse_args(argv)

    print(f"{'kernel':16s} {'fallback ms':>12s} {'numba ms':>10s} {'speedup':>8s}")
    for name, a, b in kernel_rows(args.repeat):
        print(f"{name:16s} {a * 1e3:12.3f} {b * 1e3:10.3f} {a / b:8.1f}x")
    e2e = end_to_end(args.scenario)
    print(f"\nscenario {args.scenario}: numba {e2e['numba']:.2f} s, numpy {e2e['numpy']:.2f} s")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
