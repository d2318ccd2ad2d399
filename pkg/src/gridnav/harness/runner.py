"""Run scenario files and write trace, metrics and plot outputs."""
from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Optional

from ..navigator import Navigator, RunResult
from .config import Scenario, load
from .trace import header_record, metrics, write_trace


def scenarios_dir() -> Path:
    """Directory of the scenario files shipped with the package."""
    return Path(str(resources.files("gridnav.harness") / "scenarios"))


def builtin(name: str) -> Scenario:
    return load(scenarios_dir() / f"{name}.yaml")


@dataclass
class ScenarioRun:
    scenario: Scenario
    result: RunResult
    metrics: dict
    trace_path: Optional[Path] = None
    metrics_path: Optional[Path] = None
    plot_path: Optional[Path] = None


def execute(sc: Scenario, max_ticks: Optional[int] = None) -> tuple[RunResult, dict, dict]:
    nav = Navigator(sc.world, sc.nav_params())
    res = nav.run(sc.scripts(), max_ticks or sc.max_ticks)
    head = header_record(sc.name, sc.scenario, sc.world, nav.global_path)
    return res, head, metrics(sc.name, sc.scenario, res, sc.world.r)


def run_scenario(
    sc: Scenario,
    out_dir: Optional[str | Path] = None,
    max_ticks: Optional[int] = None,
    T: Optional[float] = None,
    plot_format: Optional[str] = "png",
) -> ScenarioRun:
    if T is not None:
        sc = sc.with_T(T)
    res, head, m = execute(sc, max_ticks)
    run = ScenarioRun(sc, res, m)
    if out_dir is None:
        return run
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    run.trace_path = out / f"{sc.name}.trace.jsonl"
    write_trace(run.trace_path, head, res.reports, sc.world.T)
    run.metrics_path = out / f"{sc.name}.metrics.json"
    run.metrics_path.write_text(json.dumps(m, indent=2) + "\n", encoding="utf-8")
    if plot_format and plot_format != "none":
        from .plot import plot_trace

        run.plot_path = plot_trace(run.trace_path, out / f"{sc.name}.{plot_format}")
    return run


def run_file(path: str | Path, out_dir=None, max_ticks=None, T=None, plot_format="png") -> ScenarioRun:
    return run_scenario(load(path), out_dir, max_ticks, T, plot_format)
