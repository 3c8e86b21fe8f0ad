"""Command-line interface.

Subcommands mirror the pipeline stages: `generate` an instance file,
`encode` it to the spin model, `evolve` a single schedule, `sweep` /
`tsweep` a corpus, `qaoa` for the variational runs, and `report` to digest
JSON-lines output into CSV, a summary, and figures.

Exit codes: 0 on success, 2 on configuration errors, 1 on runtime errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__
from .evolve import evolve
from .harness import (
    ConfigError,
    SweepConfig,
    VariationalSweepConfig,
    report,
    run_sweep,
    run_tsweep,
    run_variational_sweep,
)
from .ising import ground_states, to_ising
from .portfolio import (
    GenParams,
    ProblemSpec,
    generate_instance,
    load_instance,
    save_instance,
)
from .schedule import CdMode, Schedule


def _add_instance_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--n", type=int, default=6, help="number of assets")
    parser.add_argument("--g", type=int, default=2, help="budget slices per asset")
    parser.add_argument("--budget", type=float, default=1.0, help="total budget b")
    parser.add_argument("--theta1", type=float, default=0.3, help="returns weight")
    parser.add_argument("--theta2", type=float, default=0.5, help="budget-penalty weight")
    parser.add_argument("--theta3", type=float, default=0.2, help="risk weight")
    parser.add_argument("--hx", type=float, default=1.0, help="transverse field strength")
    parser.add_argument("--seed", type=int, default=0, help="master seed")


def _add_schedule_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--T", default="1.0",
                        help="total evolution time (comma list for tsweep)")
    parser.add_argument("--dt", type=float, default=0.05, help="Trotter step size")


def _parse_modes(text: str) -> tuple[CdMode, ...]:
    try:
        return tuple(CdMode(part.strip()) for part in text.split(",") if part.strip())
    except ValueError as exc:
        raise ConfigError(f"bad --mode value: {exc}") from None


def _parse_t_grid(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(part) for part in text.split(",") if part.strip())
    except ValueError:
        raise ConfigError(f"bad --T value {text!r}") from None


def _spec_from_args(args: argparse.Namespace) -> ProblemSpec:
    market = generate_instance(args.n, args.seed, GenParams())
    return ProblemSpec(
        market=market, b=args.budget, g=args.g,
        theta1=args.theta1, theta2=args.theta2, theta3=args.theta3, hx=args.hx,
    )


def _cmd_generate(args: argparse.Namespace) -> int:
    spec = _spec_from_args(args)
    save_instance(spec, args.out, seed=args.seed, gen_params=GenParams())
    print(f"wrote {args.out} (n={spec.n}, g={spec.g}, N={spec.n_qubits})")
    return 0


def _cmd_encode(args: argparse.Namespace) -> int:
    spec, _ = load_instance(args.instance)
    model = to_ising(spec)
    payload = {
        "n_qubits": model.n_qubits,
        "h": model.h.tolist(),
        "J": model.J.tolist(),
        "beta_offset": model.beta_offset,
        "hx": model.hx,
    }
    Path(args.out).write_text(json.dumps(payload, indent=2) + "\n")
    print(f"wrote {args.out} (N={model.n_qubits})")
    return 0


def _cmd_evolve(args: argparse.Namespace) -> int:
    if args.instance:
        spec, payload = load_instance(args.instance)
        seed = payload.get("seed")
    else:
        spec, seed = _spec_from_args(args), args.seed
    t_grid = _parse_t_grid(args.T)
    if len(t_grid) != 1:
        raise ConfigError("evolve takes a single --T value")
    model = to_ising(spec)
    truth = ground_states(model)
    steps = round(t_grid[0] / args.dt)
    if steps < 1 or abs(steps * args.dt - t_grid[0]) > 1e-12 * max(1.0, t_grid[0]):
        raise ConfigError(f"dt={args.dt} does not divide T={t_grid[0]}")
    sched = Schedule(T=t_grid[0], M=steps)
    modes = _parse_modes(args.mode)
    rows = []
    for mode in modes:
        rep = evolve(model, truth, sched, mode, instance_id="cli", seed=seed)
        row = rep.to_row()
        row.update({"n": spec.n, "g": spec.g})
        rows.append(row)
    text = "\n".join(json.dumps(r) for r in rows)
    if args.out:
        Path(args.out).write_text(text + "\n")
    print(text)
    return 0


def _sweep_config_from_args(args: argparse.Namespace) -> SweepConfig:
    return SweepConfig(
        instances=args.instances, n=args.n, g=args.g, b=args.budget,
        theta1=args.theta1, theta2=args.theta2, theta3=args.theta3, hx=args.hx,
        T=_parse_t_grid(args.T), dt=args.dt, modes=_parse_modes(args.mode),
        master_seed=args.seed, threads=args.threads,
    )


def _emit_sweep(sweep, args: argparse.Namespace) -> int:
    if args.out:
        sweep.write_jsonl(args.out)
    print(sweep.summary_json())
    return 0


def _cmd_sweep(args: argparse.Namespace) -> int:
    return _emit_sweep(run_sweep(_sweep_config_from_args(args)), args)


def _cmd_tsweep(args: argparse.Namespace) -> int:
    return _emit_sweep(run_tsweep(_sweep_config_from_args(args)), args)


def _cmd_qaoa(args: argparse.Namespace) -> int:
    ansatz = tuple(a.strip() for a in args.ansatz.split(",") if a.strip())
    config = VariationalSweepConfig(
        instances=args.instances, n=args.n, g=args.g, p=args.layers,
        ansatz=ansatz, b=args.budget, theta1=args.theta1, theta2=args.theta2,
        theta3=args.theta3, hx=args.hx, restarts=args.restarts,
        top_k=args.topk, max_iters=args.iters, master_seed=args.seed,
    )
    return _emit_sweep(run_variational_sweep(config), args)


def _cmd_report(args: argparse.Namespace) -> int:
    summary = report(args.input, args.out, bins=args.bins,
                     render_figures=not args.no_figures)
    for err in summary["parse_errors"]:
        print(f"line {err['line']}: {err['error']}", file=sys.stderr)
    print(json.dumps({k: v for k, v in summary.items() if k != "histogram"}, indent=2))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cdportfolio",
        description="Counterdiabatic digitized annealing for discrete portfolios.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="write a random instance JSON file")
    _add_instance_args(p)
    p.add_argument("--out", required=True, help="output instance path")
    p.set_defaults(func=_cmd_generate)

    p = sub.add_parser("encode", help="instance JSON -> Ising JSON")
    p.add_argument("instance", help="instance JSON path")
    p.add_argument("--out", required=True, help="output Ising path")
    p.set_defaults(func=_cmd_encode)

    p = sub.add_parser("evolve", help="run one digitized evolution")
    _add_instance_args(p)
    _add_schedule_args(p)
    p.add_argument("--instance", default=None, help="instance JSON (overrides --n/--seed)")
    p.add_argument("--mode", default="none,lcd", help="comma list of {none,lcd,acd}")
    p.add_argument("--out", default=None, help="optional JSONL output path")
    p.set_defaults(func=_cmd_evolve)

    for name, fn, t_default in (("sweep", _cmd_sweep, "1.0"),
                                ("tsweep", _cmd_tsweep, "0.5,1,2,4")):
        p = sub.add_parser(name, help=f"{name} over a random corpus")
        _add_instance_args(p)
        _add_schedule_args(p)
        p.set_defaults(T=t_default)
        p.add_argument("--instances", type=int, default=10, help="corpus size")
        p.add_argument("--mode", default="lcd", help="CD modes to compare (comma list)")
        p.add_argument("--threads", type=int, default=1, help="instance-level parallelism")
        p.add_argument("--out", default=None, help="JSONL output path")
        p.set_defaults(func=fn)

    p = sub.add_parser("qaoa", help="variational runs (QAOA / extended ansatz)")
    _add_instance_args(p)
    p.set_defaults(n=3)
    p.add_argument("--instances", type=int, default=4, help="corpus size")
    p.add_argument("--layers", type=int, default=1, help="ansatz depth p")
    p.add_argument("--restarts", type=int, default=20, help="random restarts")
    p.add_argument("--topk", type=int, default=10, help="restarts kept for the mean")
    p.add_argument("--iters", type=int, default=500, help="optimizer iteration cap")
    p.add_argument("--ansatz", default="qaoa,dcqaoa", help="comma list of ansatz kinds")
    p.add_argument("--out", default=None, help="JSONL output path")
    p.set_defaults(func=_cmd_qaoa)

    p = sub.add_parser("report", help="JSONL -> CSV + summary + figures")
    p.add_argument("input", help="JSONL report path")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--bins", type=int, default=25, help="histogram bin count")
    p.add_argument("--no-figures", action="store_true", help="skip figure rendering")
    p.set_defaults(func=_cmd_report)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        print(f"runtime error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
