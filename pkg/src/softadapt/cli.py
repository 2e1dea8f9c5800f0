"""Command-line experiment runner.

Subcommands: `bench` descends a named test problem, `sae` trains the
sparse-autoencoder demo, `compare` summarizes two bench traces, and
`rerun` repeats a run from its manifest.  Every run writes a CSV trace
plus a JSON manifest holding the fully resolved configuration, so the
run can be reproduced from the manifest alone.

Exit codes: 0 converged/completed, 2 iteration cap reached, 3 diverged,
64 usage error.  Default output directory: $SOFTADAPT_OUT_DIR or ./runs.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from ._backend import resolve_backend
from .benchmarks import BENCHMARKS
from .core import VARIANTS, SoftAdaptConfig
from .optimize import (
    TERM_CONVERGED,
    TERM_MAX_ITERS,
    DivergenceError,
    StepRule,
    descend,
)
from .sae import TrainConfig, generate_patterns, init_net, train
from .traceio import (
    manifest_path_for,
    read_manifest,
    read_trace,
    write_bench_trace,
    write_manifest,
    write_sae_trace,
)

EXIT_OK = 0
EXIT_MAX_ITERS = 2
EXIT_DIVERGED = 3
EXIT_USAGE = 64

STEP_KINDS = {"fixed": "fixed", "bb": "barzilai_borwein"}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """argparse parser whose usage failures exit with code 64."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _out_dir() -> Path:
    return Path(os.environ.get("SOFTADAPT_OUT_DIR", "runs"))


def _parse_x0(text: str, dim: int) -> list[float]:
    try:
        values = [float(part) for part in text.split(",")]
    except ValueError:
        raise UsageError(f"could not parse --x0 {text!r} as comma-separated floats")
    if len(values) != dim:
        raise UsageError(f"--x0 must have {dim} coordinates, got {len(values)}")
    return values


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="softadapt", description=__doc__)
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    bench = sub.add_parser("bench", help="run weighted descent on a test problem")
    bench.add_argument("benchmark", choices=sorted(BENCHMARKS))
    bench.add_argument("--variant", choices=VARIANTS, default="original")
    bench.add_argument("--beta", type=float, default=0.1)
    bench.add_argument("--epsilon", type=float, default=1e-8)
    bench.add_argument("--history-len", type=int, default=5)
    bench.add_argument("--fd-order", type=int, default=None)
    bench.add_argument("--step", choices=sorted(STEP_KINDS), default="fixed")
    bench.add_argument("--eta", type=float, default=1e-3)
    bench.add_argument("--eta-min", type=float, default=1e-4)
    bench.add_argument("--eta-max", type=float, default=1e-1)
    bench.add_argument("--bb-variant", choices=("long", "short"), default="long")
    bench.add_argument(
        "--x0",
        default=None,
        help="comma-separated start point (defaults: rosenbrock -1,-1; beale 1,1)",
    )
    bench.add_argument("--max-iters", type=int, default=200_000)
    bench.add_argument("--tol", type=float, default=1e-4)
    bench.add_argument("--criterion", choices=("tloss", "grad_norm"), default="tloss")
    bench.add_argument("--backend", default="auto")
    bench.add_argument("--seed", type=int, default=0)
    bench.add_argument("--out", default=None, help="trace CSV path")

    sae = sub.add_parser("sae", help="train the sparse-autoencoder demo")
    sae.add_argument("--mode", choices=("softadapt", "fixed"), default="softadapt")
    sae.add_argument("--lambda", dest="lam", type=float, default=1e-4)
    sae.add_argument("--variant", choices=VARIANTS, default="loss-weighted")
    sae.add_argument("--beta", type=float, default=0.1)
    sae.add_argument("--epsilon", type=float, default=1e-8)
    sae.add_argument("--history-len", type=int, default=5)
    sae.add_argument("--fd-order", type=int, default=None)
    sae.add_argument("--epochs", type=int, default=30)
    sae.add_argument("--batch-size", type=int, default=32)
    sae.add_argument("--lr", type=float, default=1e-2)
    sae.add_argument("--seed", type=int, default=7)
    sae.add_argument("--dim", type=int, default=64)
    sae.add_argument("--hidden", type=int, default=16)
    sae.add_argument("--count", type=int, default=256)
    sae.add_argument("--active", type=int, default=4)
    sae.add_argument("--backend", default="auto")
    sae.add_argument("--out", default=None, help="trace CSV path")

    compare = sub.add_parser("compare", help="summarize two bench traces")
    compare.add_argument("trace_a")
    compare.add_argument("trace_b")
    compare.add_argument("--out", default=None, help="comparison JSON path")

    rerun = sub.add_parser("rerun", help="repeat a run from its manifest")
    rerun.add_argument("manifest")
    rerun.add_argument("--out", default=None, help="trace CSV path (default: as recorded)")

    return parser


def run_bench(config: dict, out: Path) -> int:
    """Execute a bench run from a resolved config dict; returns the exit code."""
    spec = BENCHMARKS[config["benchmark"]]()
    sa_config = SoftAdaptConfig.from_variant(
        config["variant"],
        beta=config["beta"],
        epsilon=config["epsilon"],
        history_len=config["history_len"],
        fd_order=config["fd_order"],
    )
    step = config["step"]
    rule = StepRule(
        kind=step["kind"],
        eta=step["eta"],
        eta_min=step["eta_min"],
        eta_max=step["eta_max"],
        bb_variant=step["bb_variant"],
    )
    manifest = {
        "artifact_version": __version__,
        "subcommand": "bench",
        "seed": config["seed"],
        "output": str(out),
        "config": config,
    }
    write_manifest(manifest_path_for(out), manifest)
    try:
        trace = descend(
            spec.problem,
            sa_config,
            rule,
            np.array(config["x0"], dtype=float),
            max_iters=config["max_iters"],
            tol=config["tol"],
            criterion=config["criterion"],
            backend=config["backend"],
        )
    except DivergenceError as err:
        write_bench_trace(out, err.trace)
        print(f"bench {config['benchmark']}: diverged ({err}); partial trace in {out}")
        return EXIT_DIVERGED
    write_bench_trace(out, trace)
    print(
        f"bench {config['benchmark']}: {trace.termination} after {trace.iterations} "
        f"iterations, true loss {trace.final_tloss:.6g}; trace in {out}"
    )
    if trace.termination == TERM_CONVERGED:
        return EXIT_OK
    return EXIT_MAX_ITERS if trace.termination == TERM_MAX_ITERS else EXIT_DIVERGED


def run_sae(config: dict, out: Path) -> int:
    """Execute an sae run from a resolved config dict; returns the exit code."""
    sa_config = SoftAdaptConfig.from_variant(
        config["variant"],
        beta=config["beta"],
        epsilon=config["epsilon"],
        history_len=config["history_len"],
        fd_order=config["fd_order"],
    )
    train_config = TrainConfig(
        epochs=config["epochs"],
        batch_size=config["batch_size"],
        lr=config["lr"],
        seed=config["seed"],
        mode=config["mode"],
        lam=config["lam"],
        softadapt=sa_config,
    )
    manifest = {
        "artifact_version": __version__,
        "subcommand": "sae",
        "seed": config["seed"],
        "output": str(out),
        "config": config,
    }
    write_manifest(manifest_path_for(out), manifest)
    dataset = generate_patterns(
        config["seed"], config["count"], config["dim"], config["active"]
    )
    net = init_net(config["seed"], (config["dim"], config["hidden"], config["dim"]))
    try:
        trace = train(net, dataset, train_config)
    except DivergenceError as err:
        write_sae_trace(out, err.trace)
        print(f"sae: diverged ({err}); partial trace in {out}")
        return EXIT_DIVERGED
    write_sae_trace(out, trace)
    print(
        f"sae ({config['mode']}): {trace.epochs} epochs, final mse {trace.mse[-1]:.6g}, "
        f"l1 {trace.l1[-1]:.6g}, true loss {trace.final_tloss:.6g}; trace in {out}"
    )
    return EXIT_OK


def _iterations_to_tolerance(columns: dict[str, list[float]], tol: float) -> int | None:
    for i, value in zip(columns["iter"], columns["tloss"]):
        if value < tol:
            return int(i)
    return None


def run_compare(trace_a: str, trace_b: str, out: Path | None) -> int:
    manifest_a = read_manifest(manifest_path_for(trace_a))
    manifest_b = read_manifest(manifest_path_for(trace_b))
    tol_a = manifest_a["config"].get("tol")
    tol_b = manifest_b["config"].get("tol")
    if tol_a is None or tol_b is None or tol_a != tol_b:
        raise UsageError(
            f"traces are not comparable: convergence tolerances {tol_a} vs {tol_b}"
        )
    cols_a = read_trace(trace_a)
    cols_b = read_trace(trace_b)
    iters_a = _iterations_to_tolerance(cols_a, tol_a)
    iters_b = _iterations_to_tolerance(cols_b, tol_b)
    speedup = None
    if iters_a is not None and iters_b is not None and iters_b > 0:
        speedup = 1.0 - iters_a / iters_b
    record = {
        "trace_a": str(trace_a),
        "trace_b": str(trace_b),
        "tol": tol_a,
        "iterations_to_tol_a": iters_a,
        "iterations_to_tol_b": iters_b,
        "final_tloss_a": cols_a["tloss"][-1],
        "final_tloss_b": cols_b["tloss"][-1],
        "speedup_a_vs_b": speedup,
    }
    if out is not None:
        write_manifest(out, record)
    for key, value in record.items():
        print(f"{key}: {value}")
    return EXIT_OK


def _bench_config_from_args(args: argparse.Namespace) -> dict:
    spec = BENCHMARKS[args.benchmark]()
    x0 = (
        _parse_x0(args.x0, spec.problem.dim)
        if args.x0 is not None
        else [float(v) for v in spec.default_x0]
    )
    if args.max_iters < 1:
        raise UsageError(f"--max-iters must be >= 1, got {args.max_iters}")
    if args.tol <= 0:
        raise UsageError(f"--tol must be positive, got {args.tol}")
    sa_config = _sa_config_from_args(args)
    return {
        "benchmark": args.benchmark,
        "variant": args.variant,
        "beta": args.beta,
        "epsilon": args.epsilon,
        "history_len": args.history_len,
        "fd_order": sa_config.fd_order,
        "step": {
            "kind": STEP_KINDS[args.step],
            "eta": args.eta,
            "eta_min": args.eta_min,
            "eta_max": args.eta_max,
            "bb_variant": args.bb_variant,
        },
        "x0": x0,
        "max_iters": args.max_iters,
        "tol": args.tol,
        "criterion": args.criterion,
        "backend": resolve_backend(args.backend),
        "seed": args.seed,
    }


def _sa_config_from_args(args: argparse.Namespace) -> SoftAdaptConfig:
    try:
        return SoftAdaptConfig.from_variant(
            args.variant,
            beta=args.beta,
            epsilon=args.epsilon,
            history_len=args.history_len,
            fd_order=args.fd_order,
        )
    except ValueError as err:
        raise UsageError(str(err))


def _sae_config_from_args(args: argparse.Namespace) -> dict:
    if args.lam < 0:
        raise UsageError(f"--lambda must be nonnegative, got {args.lam}")
    for name in ("epochs", "batch_size", "dim", "hidden", "count", "active"):
        if getattr(args, name) < 1:
            raise UsageError(f"--{name.replace('_', '-')} must be >= 1")
    if args.lr <= 0:
        raise UsageError(f"--lr must be positive, got {args.lr}")
    if args.active > args.dim:
        raise UsageError(f"--active must not exceed --dim, got {args.active} > {args.dim}")
    sa_config = _sa_config_from_args(args)
    return {
        "mode": args.mode,
        "lam": args.lam,
        "variant": args.variant,
        "beta": args.beta,
        "epsilon": args.epsilon,
        "history_len": args.history_len,
        "fd_order": sa_config.fd_order,
        "epochs": args.epochs,
        "batch_size": args.batch_size,
        "lr": args.lr,
        "seed": args.seed,
        "dim": args.dim,
        "hidden": args.hidden,
        "count": args.count,
        "active": args.active,
        "backend": resolve_backend(args.backend),
    }


def _default_out(command: str, config: dict) -> Path:
    if command == "bench":
        name = f"bench_{config['benchmark']}_{config['variant']}_{config['step']['kind']}.csv"
    else:
        name = f"sae_{config['mode']}_seed{config['seed']}.csv"
    return _out_dir() / name


def run_rerun(manifest_path: str, out_override: str | None) -> int:
    manifest = read_manifest(manifest_path)
    command = manifest.get("subcommand")
    config = manifest.get("config")
    if command not in ("bench", "sae") or not isinstance(config, dict):
        raise UsageError(f"manifest {manifest_path} is not a rerunnable bench/sae manifest")
    out = Path(out_override) if out_override is not None else Path(manifest["output"])
    if command == "bench":
        return run_bench(config, out)
    return run_sae(config, out)


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "bench":
            config = _bench_config_from_args(args)
            out = Path(args.out) if args.out else _default_out("bench", config)
            return run_bench(config, out)
        if args.command == "sae":
            config = _sae_config_from_args(args)
            out = Path(args.out) if args.out else _default_out("sae", config)
            return run_sae(config, out)
        if args.command == "compare":
            out = Path(args.out) if args.out else None
            return run_compare(args.trace_a, args.trace_b, out)
        if args.command == "rerun":
            return run_rerun(args.manifest, args.out)
        raise UsageError(f"unknown command {args.command!r}")
    except UsageError as err:
        print(f"softadapt: error: {err}", file=sys.stderr)
        return EXIT_USAGE
    except KeyError as err:
        print(f"softadapt: error: missing manifest field {err}", file=sys.stderr)
        return EXIT_USAGE
    except (FileNotFoundError, ValueError) as err:
        print(f"softadapt: error: {err}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
