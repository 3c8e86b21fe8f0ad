"""Sweep orchestration: instance corpora, batch runs, metric aggregation.

Every sweep is a deterministic function of its config: instance i draws
its market data from a seed derived by a stable hash of (master_seed, i),
so growing a corpus never perturbs existing instances, and workers can be
fanned out across threads without changing any output row.
"""

from __future__ import annotations

import json
import logging
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, asdict
from pathlib import Path

import numpy as np

logger = logging.getLogger(__name__)

from . import __version__
from .evolve import evolve
from .ising import ground_states, printed_coefficient_delta, to_ising
from .portfolio import GenParams, ProblemSpec, generate_instance
from .schedule import AcdAction, CdMode, Schedule
from .variational import AnsatzConfig, optimize


class ConfigError(ValueError):
    """Invalid sweep or CLI configuration (exit code 2)."""


def derive_seed(master_seed: int, *indices: int) -> int:
    """Stable per-item seed from a master seed and index path."""
    state = np.random.SeedSequence((master_seed, *indices)).generate_state(2)
    return int(state[0]) + (int(state[1]) << 32)


@dataclass(frozen=True)
class SweepConfig:
    """One corpus sweep: instance family, schedule, and CD modes to compare."""

    instances: int
    n: int
    g: int
    b: float = 1.0
    theta1: float = 0.3
    theta2: float = 0.5
    theta3: float = 0.2
    hx: float = 1.0
    T: tuple[float, ...] = (1.0,)
    dt: float = 0.05
    modes: tuple[CdMode, ...] = (CdMode.LCD,)
    master_seed: int = 0
    threads: int = 1
    gen_params: GenParams = GenParams()

    def __post_init__(self) -> None:
        if self.instances < 1:
            raise ConfigError("need at least one instance")
        if self.g < 1:
            raise ConfigError("g must be at least 1")
        if self.dt <= 0:
            raise ConfigError("dt must be positive")
        if not self.T or any(t <= 0 for t in self.T):
            raise ConfigError("every T must be positive")
        if self.threads < 1:
            raise ConfigError("threads must be at least 1")
        for t in self.T:
            steps = t / self.dt
            if abs(steps - round(steps)) > 1e-12 * max(1.0, steps):
                raise ConfigError(f"dt={self.dt} does not divide T={t}")

    def steps_for(self, t: float) -> int:
        return max(1, round(t / self.dt))

    def run_modes(self) -> tuple[CdMode, ...]:
        """Baseline first, then the requested CD modes (deduplicated)."""
        out = [CdMode.NONE]
        for mode in self.modes:
            if mode not in out:
                out.append(mode)
        return tuple(out)

    def to_json_dict(self) -> dict:
        payload = asdict(self)
        payload["modes"] = [m.value for m in self.modes]
        payload["T"] = list(self.T)
        return payload


@dataclass
class SweepReport:
    """Raw per-run rows plus aggregates recomputable from them."""

    config: dict
    version: str
    rows: list[dict]
    aggregates: dict
    histogram: dict | None = None
    elapsed_seconds: float = 0.0

    def write_jsonl(self, path: str | Path) -> None:
        with open(path, "w") as fh:
            for row in self.rows:
                fh.write(json.dumps(row) + "\n")

    def summary_json(self) -> str:
        return json.dumps(
            {
                "config": self.config,
                "version": self.version,
                "aggregates": self.aggregates,
                "histogram": self.histogram,
                "rows": len(self.rows),
                "elapsed_seconds": self.elapsed_seconds,
            },
            indent=2,
        )


def _spec_for_instance(config: SweepConfig, index: int) -> tuple[ProblemSpec, int]:
    seed = derive_seed(config.master_seed, index)
    market = generate_instance(config.n, seed, config.gen_params)
    spec = ProblemSpec(
        market=market,
        b=config.b,
        g=config.g,
        theta1=config.theta1,
        theta2=config.theta2,
        theta3=config.theta3,
        hx=config.hx,
    )
    return spec, seed


def _run_instance(config: SweepConfig, index: int) -> list[dict]:
    """All (T, mode) runs of one instance, as serializable rows."""
    spec, seed = _spec_for_instance(config, index)
    model = to_ising(spec)
    if logger.isEnabledFor(logging.DEBUG):
        delta = printed_coefficient_delta(spec)
        logger.debug(
            "instance %d: derived-vs-table coefficient delta dJ=%.3e dh=%.3e",
            index, delta["max_dJ"], delta["max_dh"],
        )
    truth = ground_states(model)
    acd = AcdAction(model) if CdMode.ACD in config.run_modes() else None
    instance_id = f"i{index:05d}"
    rows = []
    for t in config.T:
        sched = Schedule(T=t, M=config.steps_for(t))
        baselines: dict[float, float] = {}
        for mode in config.run_modes():
            report = evolve(
                model, truth, sched, mode,
                instance_id=instance_id, seed=seed, acd=acd,
            )
            row = report.to_row()
            row.update(
                {"n": config.n, "g": config.g, "instance_index": index,
                 "b": config.b, "theta1": config.theta1, "theta2": config.theta2,
                 "theta3": config.theta3, "hx": config.hx}
            )
            if mode == CdMode.NONE:
                baselines[t] = report.success_probability
                row["p_enh"] = None
            else:
                p0 = baselines[t]
                row["p_enh"] = (
                    report.success_probability / p0 if p0 > 0.0 else None
                )
            rows.append(row)
    return rows


def _aggregate(rows: list[dict]) -> dict:
    """Per-(mode, T) aggregates per the enhancement-metric conventions."""
    by_key: dict[tuple[str, float], list[dict]] = {}
    for row in rows:
        by_key.setdefault((row["mode"], row["T"]), []).append(row)

    aggregates: dict[str, dict] = {}
    for (mode, t), group in sorted(by_key.items()):
        group = sorted(group, key=lambda r: r["instance_index"])
        p_values = [r["P"] for r in group]
        entry = {
            "mode": mode,
            "T": t,
            "instances": len(group),
            "mean_P": float(np.mean(p_values)),
            "std_P": float(np.std(p_values)),
        }
        if mode != CdMode.NONE.value:
            baseline = {
                (r["instance_index"]): r
                for r in rows
                if r["mode"] == CdMode.NONE.value and r["T"] == t
            }
            enhanced = 0
            defined = []
            for r in group:
                p0 = baseline[r["instance_index"]]["P"]
                p = r["P"]
                if p0 == 0.0:
                    if p > 0.0:
                        enhanced += 1
                else:
                    ratio = p / p0
                    defined.append(ratio)
                    if ratio > 1.0:
                        enhanced += 1
            entry.update(
                {
                    "r_enh": enhanced / len(group),
                    "mean_p_enh": float(np.mean(defined)) if defined else math.nan,
                    "std_p_enh": float(np.std(defined)) if defined else math.nan,
                    "median_p_enh": float(np.median(defined)) if defined else math.nan,
                    "defined_p_enh": len(defined),
                }
            )
        aggregates[f"{mode}@T={t:g}"] = entry
    return aggregates


def run_sweep(config: SweepConfig) -> SweepReport:
    """Evolve every instance under every requested mode; aggregate."""
    start = time.perf_counter()
    indices = range(config.instances)
    if config.threads > 1:
        with ThreadPoolExecutor(max_workers=config.threads) as pool:
            per_instance = list(pool.map(lambda i: _run_instance(config, i), indices))
    else:
        per_instance = [_run_instance(config, i) for i in indices]
    rows = [row for instance_rows in per_instance for row in instance_rows]
    return SweepReport(
        config=config.to_json_dict(),
        version=__version__,
        rows=rows,
        aggregates=_aggregate(rows),
        histogram=histogram_data(rows),
        elapsed_seconds=time.perf_counter() - start,
    )


def run_tsweep(config: SweepConfig) -> SweepReport:
    """Success probability across a T grid (config.T holds the grid)."""
    if len(config.T) < 2:
        raise ConfigError("tsweep needs an ascending T grid with >= 2 points")
    if any(b <= a for a, b in zip(config.T, config.T[1:])):
        raise ConfigError("T grid must be strictly ascending")
    return run_sweep(config)


def coefficient_check(config: SweepConfig, index: int = 0) -> dict:
    """Printed-vs-derived Ising coefficient deltas for one instance."""
    spec, seed = _spec_for_instance(config, index)
    delta = printed_coefficient_delta(spec)
    delta["seed"] = seed
    return delta


# ---------------------------------------------------------------------------
# Variational sweeps
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class VariationalSweepConfig:
    """Corpus config for QAOA-style runs."""

    instances: int
    n: int
    g: int
    p: int
    ansatz: tuple[str, ...] = ("qaoa", "dcqaoa")
    b: float = 1.0
    theta1: float = 0.3
    theta2: float = 0.5
    theta3: float = 0.2
    hx: float = 1.0
    restarts: int = 20
    top_k: int = 10
    max_iters: int = 500
    step_size: float = 0.1
    master_seed: int = 0

    def __post_init__(self) -> None:
        if self.instances < 1:
            raise ConfigError("need at least one instance")
        if self.p < 1:
            raise ConfigError("p must be at least 1")
        bad = [a for a in self.ansatz if a not in ("qaoa", "dcqaoa")]
        if bad:
            raise ConfigError(f"unknown ansatz {bad[0]!r}")


def run_variational_sweep(config: VariationalSweepConfig) -> SweepReport:
    """Optimize each requested ansatz on each instance; emit report rows."""
    start = time.perf_counter()
    sweep_cfg = SweepConfig(
        instances=config.instances, n=config.n, g=config.g, b=config.b,
        theta1=config.theta1, theta2=config.theta2, theta3=config.theta3,
        hx=config.hx, master_seed=config.master_seed,
    )
    rows = []
    for index in range(config.instances):
        spec, seed = _spec_for_instance(sweep_cfg, index)
        model = to_ising(spec)
        truth = ground_states(model)
        for ansatz in config.ansatz:
            cfg = AnsatzConfig(
                p=config.p, mode=ansatz, restarts=config.restarts,
                top_k=config.top_k, max_iters=config.max_iters,
                step_size=config.step_size,
            )
            report = optimize(
                model, truth, cfg, seed=derive_seed(config.master_seed, index, 1),
                instance_id=f"i{index:05d}",
            )
            row = report.to_row()
            row.update(
                {"n": config.n, "g": config.g, "N": spec.n_qubits,
                 "instance_index": index, "degeneracy": truth.degeneracy}
            )
            rows.append(row)
    aggregates: dict[str, dict] = {}
    for ansatz in config.ansatz:
        means = [r["topk_mean"] for r in rows if r["mode"] == ansatz]
        aggregates[f"{ansatz}@p={config.p}"] = {
            "mode": ansatz,
            "p": config.p,
            "instances": len(means),
            "mean_topk": float(np.mean(means)) if means else math.nan,
        }
    payload = asdict(config)
    payload["ansatz"] = list(config.ansatz)
    return SweepReport(
        config=payload,
        version=__version__,
        rows=rows,
        aggregates=aggregates,
        elapsed_seconds=time.perf_counter() - start,
    )


# ---------------------------------------------------------------------------
# Report path: JSONL -> CSV + summary (+ figures, rendered by plots.py)
# ---------------------------------------------------------------------------

#: CSV header names and the row keys they are sourced from.
CSV_COLUMNS = (
    ("instance_id", "instance_id"), ("mode", "mode"), ("N", "N"), ("n", "n"),
    ("g", "g"), ("T", "T"), ("dt", "dt"), ("P", "P"), ("P_enh", "p_enh"),
    ("energy", "energy"), ("degeneracy", "degeneracy"),
)


def load_rows(path: str | Path) -> tuple[list[dict], list[tuple[int, str]]]:
    """Parse a JSON-lines file; malformed rows are collected, not fatal."""
    rows: list[dict] = []
    errors: list[tuple[int, str]] = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                row = json.loads(line)
                if not isinstance(row, dict):
                    raise ValueError("row is not an object")
                rows.append(row)
            except ValueError as exc:
                errors.append((lineno, str(exc)))
    return rows, errors


def _csv_cell(value) -> str:
    if value is None:
        return ""
    return repr(value) if isinstance(value, float) else str(value)


def write_csv(rows: list[dict], path: str | Path) -> None:
    with open(path, "w") as fh:
        fh.write(",".join(name for name, _ in CSV_COLUMNS) + "\n")
        for row in rows:
            fh.write(",".join(_csv_cell(row.get(key)) for _, key in CSV_COLUMNS) + "\n")


def histogram_data(rows: list[dict], bins: int = 25) -> dict:
    """Per-mode histogram of success probabilities over shared bin edges."""
    p_values = [r["P"] for r in rows if "P" in r]
    p_max = max(p_values) if p_values else 1.0
    if p_max <= 0.0:
        p_max = 1.0
    edges = np.linspace(0.0, p_max, bins + 1)
    hists = {}
    for mode in sorted({r["mode"] for r in rows if "P" in r}):
        values = [r["P"] for r in rows if r["mode"] == mode]
        counts, _ = np.histogram(values, bins=edges)
        hists[mode] = counts.tolist()
    return {"bin_edges": edges.tolist(), "counts": hists}


def summarize_rows(rows: list[dict], bins: int = 25) -> dict:
    """Aggregate a row set plus histogram data, ready to serialize."""
    evolution_rows = [r for r in rows if "P" in r]
    summary: dict = {
        "rows": len(rows),
        "aggregates": _aggregate(evolution_rows) if evolution_rows else {},
        "histogram": histogram_data(evolution_rows, bins=bins) if evolution_rows else {},
    }
    summary["families"] = {
        key: sorted({r[key] for r in rows if key in r}) for key in ("n", "g")
    }
    return summary


def report(
    input_path: str | Path,
    out_dir: str | Path,
    bins: int = 25,
    render_figures: bool = True,
) -> dict:
    """Digest a JSONL report file into CSV + summary + figures.

    Returns the summary dict; parse errors are reported inside it under
    "parse_errors" with their line numbers.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    rows, errors = load_rows(input_path)
    evolution_rows = [r for r in rows if "P" in r]
    write_csv(evolution_rows, out / "report.csv")
    summary = summarize_rows(rows, bins=bins)
    summary["parse_errors"] = [
        {"line": lineno, "error": message} for lineno, message in errors
    ]
    figures: list[str] = []
    if render_figures and evolution_rows:
        from . import plots  # deferred: matplotlib import is slow

        figures = plots.render_report_figures(evolution_rows, out, bins=bins)
    summary["figures"] = figures
    (out / "summary.json").write_text(json.dumps(summary, indent=2) + "\n")
    return summary
