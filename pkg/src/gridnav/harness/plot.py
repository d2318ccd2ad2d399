"""Static trajectory plot from a trace file."""
from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
from matplotlib.patches import Rectangle  # noqa: E402

from .trace import read_trace  # noqa: E402


def plot_trace(trace_path: str | Path, out_path: str | Path) -> Path:
    header, ticks = read_trace(trace_path)
    r = header["r"]
    w, h = header["grid_w"], header["grid_h"]
    fig, ax = plt.subplots(figsize=(max(4.0, w * 0.4), max(3.0, h * 0.4)))
    ax.set_xlim(-0.5, w - 0.5)
    ax.set_ylim(-0.5, h - 0.5)
    ax.set_aspect("equal")
    ax.set_xticks(range(w))
    ax.set_yticks(range(h))
    ax.tick_params(labelsize=6)
    ax.grid(True, linewidth=0.3, color="0.85")

    # every footprint ever occupied, faint; the final one solid
    seen = set()
    for rec in ticks:
        for _, fp in rec["obstacles"]:
            seen.add(tuple(fp))
    for gx0, gy0, gx1, gy1 in sorted(seen):
        ax.add_patch(Rectangle((gx0 - 0.5, gy0 - 0.5), gx1 - gx0 + 1, gy1 - gy0 + 1, color="0.6", alpha=0.15, lw=0))
    if ticks:
        for _, (gx0, gy0, gx1, gy1) in ticks[-1]["obstacles"]:
            ax.add_patch(Rectangle((gx0 - 0.5, gy0 - 0.5), gx1 - gx0 + 1, gy1 - gy0 + 1, color="0.3"))

    gp = header["global_path"]
    s = header["start"]
    t = header["target"]
    ax.plot([s[0] / r, t[0]], [s[1] / r, t[1]], color="green", lw=1.5, label="global line")
    if gp:
        ax.plot(*zip(*gp), ls="none", marker="s", ms=2, color="green", alpha=0.4)
    xs = [rec["pose"][0] / r for rec in ticks]
    ys = [rec["pose"][1] / r for rec in ticks]
    ax.plot(xs, ys, color="blue", lw=1.2, label="robot")
    for rec in ticks:
        if rec["planner"] is not None:
            ax.plot(rec["pose"][0] / r, rec["pose"][1] / r, marker="x", color="red", ms=5)
    ax.plot(t[0], t[1], marker="*", color="orange", ms=10)
    ax.set_title(header.get("name") or "", fontsize=8)
    ax.legend(fontsize=6, loc="upper right")
    out_path = Path(out_path)
    fig.savefig(out_path, dpi=120, bbox_inches="tight")
    plt.close(fig)
    return out_path
