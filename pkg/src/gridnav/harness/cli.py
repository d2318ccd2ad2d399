"""``gridnav`` command line.

Exit codes: 0 success, 1 an ordering check failed, 2 invalid input or
missing scenario, 3 a run ended in Timeout or NoFeasiblePath, 4 the robot
left the grid.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Optional, Sequence

from ..navigator import Outcome
from .compare import SUITE, MissingScenario, compare_suite, load_metrics
from .config import ConfigInvalid
from .plot import plot_trace
from .runner import run_file, scenarios_dir

EXIT_OK = 0
EXIT_ORDER = 1
EXIT_INPUT = 2
EXIT_STUCK = 3
EXIT_BOUNDS = 4

_OUTCOME_EXIT = {
    Outcome.REACHED.value: EXIT_OK,
    Outcome.TIMEOUT.value: EXIT_STUCK,
    Outcome.NO_PATH.value: EXIT_STUCK,
    Outcome.OUT_OF_BOUNDS.value: EXIT_BOUNDS,
}


def _row(m: dict) -> str:
    return (
        f"{m['name']:<16} {m['outcome']:<16} ticks={m['ticks']:<5} path={m['path_length_cells']:<9.3f}"
        f" morphin={m['morphin_invocations']:<3} wait={m['wait_ticks']:<4} slow={m['slowdown_ticks']:<4}"
        f" clear={m['min_clearance_cells']} collisions={m['collision_count']}"
    )


def _emit(rows: list[dict], fmt: str) -> None:
    if fmt == "json":
        print(json.dumps(rows, indent=2))
    else:
        for m in rows:
            print(_row(m))


def cmd_run(args) -> int:
    run = run_file(args.config, args.out, args.max_ticks, args.T, args.plot)
    _emit([run.metrics], args.format)
    return _OUTCOME_EXIT[run.metrics["outcome"]]


def _report(checks, fmt: str) -> None:
    if fmt == "json":
        print(json.dumps([{"check": c.line()[5:], "ok": c.ok} for c in checks], indent=2))
    else:
        for c in checks:
            print(c.line())


def cmd_suite(args) -> int:
    d = Path(args.dir) if args.dir else scenarios_dir()
    files = sorted(d.glob("*.yaml"))
    if not files:
        print(f"no scenario files in {d}", file=sys.stderr)
        return EXIT_INPUT
    rows = []
    code = EXIT_OK
    for f in files:
        run = run_file(f, Path(args.out) / f.stem if args.out else None, args.max_ticks, args.T, args.plot)
        rows.append(run.metrics)
        code = max(code, _OUTCOME_EXIT[run.metrics["outcome"]])
    _emit(rows, args.format)
    labelled = [m for m in rows if m.get("scenario")]
    if len(labelled) >= 2:
        checks = compare_suite(labelled)
        _report(checks, args.format)
        if code == EXIT_OK and not all(c.ok for c in checks):
            code = EXIT_ORDER
    return code


def cmd_compare(args) -> int:
    required = [s for s in (args.require or "") if s in SUITE]
    checks = compare_suite(load_metrics(args.metrics), required)
    _report(checks, args.format)
    return EXIT_OK if all(c.ok for c in checks) else EXIT_ORDER


def cmd_plot(args) -> int:
    src = Path(args.trace)
    out = Path(args.out) if args.out else src.with_suffix("")
    if out.is_dir():
        out = out / (src.name.split(".")[0] + f".{args.plot}")
    elif not out.suffix:
        out = out.with_suffix(f".{args.plot}")
    print(plot_trace(src, out))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="gridnav", description="Grid-world navigation scenario harness.")
    p.add_argument("-v", "--verbose", action="store_true", help="log debug output")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, plot=True):
        sp.add_argument("--out", help="output directory (file for plot)")
        sp.add_argument("--format", choices=("text", "json"), default="text", help="stdout report format")
        if plot:
            sp.add_argument("--plot", choices=("png", "svg", "pdf", "none"), default="png", help="plot image format")

    r = sub.add_parser("run", help="run one scenario file")
    r.add_argument("config")
    common(r)
    r.add_argument("--max-ticks", type=int, default=None)
    r.add_argument("--T", type=float, default=None, help="override the scan period (s)")
    r.set_defaults(func=cmd_run)

    s = sub.add_parser("suite", help="run every scenario in a directory (default: shipped scenarios)")
    s.add_argument("dir", nargs="?")
    common(s)
    s.add_argument("--max-ticks", type=int, default=None)
    s.add_argument("--T", type=float, default=None)
    s.set_defaults(func=cmd_suite)

    c = sub.add_parser("compare", help="check tick-count ordering across metrics files")
    c.add_argument("metrics", nargs="+")
    c.add_argument("--require", help="scenario labels that must be present, e.g. abcdefgh")
    common(c, plot=False)
    c.set_defaults(func=cmd_compare)

    pl = sub.add_parser("plot", help="render a trace file")
    pl.add_argument("trace")
    common(pl)
    pl.set_defaults(func=cmd_plot)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except ConfigInvalid as exc:
        print(f"invalid config: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except MissingScenario as exc:
        print(f"missing scenario: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
