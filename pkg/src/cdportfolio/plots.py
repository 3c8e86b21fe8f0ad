"""Figure rendering for the report path.

Figures are written next to the delimited output: a histogram of success
probabilities per mode, an enhancement-ratio histogram when CD rows are
present, and per-instance P(T) curves when the rows span a time grid.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

_MODE_COLORS = {
    "none": "#777777",
    "lcd": "#1f77b4",
    "acd": "#d62728",
    "qaoa": "#1f77b4",
    "dcqaoa": "#ff7f0e",
}


def _color(mode: str) -> str:
    return _MODE_COLORS.get(mode, "#2ca02c")


def render_success_histogram(rows: list[dict], path: Path, bins: int = 25) -> None:
    """Overlaid per-mode histograms of ground-state success probability."""
    p_max = max((r["P"] for r in rows), default=1.0) or 1.0
    edges = np.linspace(0.0, p_max, bins + 1)
    modes = sorted({r["mode"] for r in rows})
    fig, ax = plt.subplots(figsize=(6.4, 4.0))
    for mode in modes:
        values = [r["P"] for r in rows if r["mode"] == mode]
        ax.hist(values, bins=edges, alpha=0.6, label=mode, color=_color(mode))
    ax.set_xlabel("success probability")
    ax.set_ylabel("instances")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_enhancement_histogram(rows: list[dict], path: Path, bins: int = 25) -> None:
    """Histogram of P/P0 per CD mode on a log-scaled ratio axis."""
    ratios = {
        mode: [r["p_enh"] for r in rows if r["mode"] == mode and r.get("p_enh")]
        for mode in sorted({r["mode"] for r in rows if r.get("p_enh") is not None})
    }
    ratios = {m: v for m, v in ratios.items() if v}
    if not ratios:
        return
    low = min(min(v) for v in ratios.values())
    high = max(max(v) for v in ratios.values())
    low, high = min(low, 0.5), max(high, 2.0)
    edges = np.geomspace(low, high, bins + 1)
    fig, ax = plt.subplots(figsize=(6.4, 4.0))
    for mode, values in ratios.items():
        ax.hist(values, bins=edges, alpha=0.6, label=mode, color=_color(mode))
    ax.axvline(1.0, color="black", linewidth=0.8, linestyle="--")
    ax.set_xscale("log")
    ax.set_xlabel("success-probability enhancement P / P0")
    ax.set_ylabel("instances")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_time_curves(rows: list[dict], path: Path) -> None:
    """Per-instance success probability versus total evolution time."""
    modes = sorted({r["mode"] for r in rows})
    fig, ax = plt.subplots(figsize=(6.4, 4.0))
    for mode in modes:
        series: dict[str, list[tuple[float, float]]] = {}
        for r in rows:
            if r["mode"] == mode:
                series.setdefault(r["instance_id"], []).append((r["T"], r["P"]))
        for points in series.values():
            points.sort()
            ts, ps = zip(*points)
            ax.plot(ts, ps, color=_color(mode), alpha=0.25, linewidth=0.8)
        # opaque median curve on top of the per-instance fan
        t_grid = sorted({r["T"] for r in rows if r["mode"] == mode})
        medians = [
            float(np.median([r["P"] for r in rows if r["mode"] == mode and r["T"] == t]))
            for t in t_grid
        ]
        ax.plot(t_grid, medians, color=_color(mode), linewidth=2.0, label=mode)
    ax.set_xlabel("total evolution time T")
    ax.set_ylabel("success probability")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_report_figures(rows: list[dict], out_dir: Path, bins: int = 25) -> list[str]:
    """Render every figure the row set supports; return written filenames."""
    out_dir = Path(out_dir)
    written: list[str] = []

    path = out_dir / "success_histogram.png"
    render_success_histogram(rows, path, bins=bins)
    written.append(path.name)

    if any(r.get("p_enh") is not None for r in rows):
        path = out_dir / "enhancement_histogram.png"
        render_enhancement_histogram(rows, path, bins=bins)
        if path.exists():
            written.append(path.name)

    if len({r["T"] for r in rows}) > 1:
        path = out_dir / "success_vs_time.png"
        render_time_curves(rows, path)
        written.append(path.name)

    return written
