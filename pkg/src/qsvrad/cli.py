"""Command line entry point: ``run``, ``toy-gen`` and ``kernel-dump``."""

from __future__ import annotations

import argparse
import sys

from .data import DataError, ToyConfig, generate_toy, write_csv
from .harness import (
    MODELS,
    ExperimentConfig,
    ExperimentError,
    mean_auc,
    prepare_source,
    render_report,
    run_many,
    write_report,
)
from .kernel import QuantumKernel, parse_kernel_mode, write_kernel_csv


def _add_source_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--dataset", action="append", default=[], metavar="PATH",
                   help="input CSV (repeatable)")
    p.add_argument("--toy", action="store_true", help="use the generated toy dataset")
    p.add_argument("--label-column", default="label")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--kernel-mode", default="exact", help="exact or shots:<N>")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qsvrad", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="train and evaluate detectors")
    _add_source_args(run)
    run.add_argument("--model", choices=(*MODELS, "all"), default="all")
    run.add_argument("--out", help="report path (default: stdout)")
    run.add_argument("--format", choices=("csv", "json"), default="csv")
    run.add_argument("--svr-c", type=float)
    run.add_argument("--svr-eps", type=float)
    run.add_argument("--rbf-gamma", type=float)
    run.add_argument("--lr", type=float)
    run.add_argument("--epochs", type=int)

    toy = sub.add_parser("toy-gen", help="write the toy dataset as CSV")
    toy.add_argument("--out", required=True)
    toy.add_argument("--seed", type=int, default=0)
    toy.add_argument("--n-normal", type=int, default=ToyConfig.n_normal)
    toy.add_argument("--n-anomalous", type=int, default=ToyConfig.n_anomalous)
    toy.add_argument("--label-column", default="label")

    dump = sub.add_parser("kernel-dump", help="write the quantum Gram matrix of the training rows")
    _add_source_args(dump)
    dump.add_argument("--out", required=True)
    return parser


def _sources(args) -> list[dict]:
    sources = [{"dataset": path} for path in args.dataset]
    if args.toy:
        sources.append({"toy": ToyConfig(seed=args.seed)})
    if not sources:
        raise ExperimentError("config", "give --dataset PATH and/or --toy")
    return sources


def _cmd_run(args) -> None:
    models = MODELS if args.model == "all" else (args.model,)
    configs = [
        ExperimentConfig(
            **src,
            model=model,
            kernel_mode=args.kernel_mode,
            seed=args.seed,
            label_column=args.label_column,
            svr_c=args.svr_c,
            svr_eps=args.svr_eps,
            rbf_gamma=args.rbf_gamma,
            lr=args.lr,
            epochs=args.epochs,
        )
        for src in _sources(args)
        for model in models
    ]
    rows = run_many(configs)
    if args.out:
        write_report(rows, args.out, args.format)
    else:
        sys.stdout.write(render_report(rows, args.format))
    for model, value in mean_auc(rows).items():
        print(f"mean AUC {model}: {value:.6f}", file=sys.stderr)


def _cmd_toy(args) -> None:
    data, _ = generate_toy(ToyConfig(n_normal=args.n_normal, n_anomalous=args.n_anomalous, seed=args.seed))
    write_csv(data, args.out, args.label_column)


def _cmd_dump(args) -> None:
    sources = _sources(args)
    if len(sources) != 1:
        raise ExperimentError("config", "kernel-dump takes exactly one data source")
    cfg = ExperimentConfig(**sources[0], seed=args.seed, label_column=args.label_column)
    data = prepare_source(cfg)
    kernel = QuantumKernel(mode=parse_kernel_mode(args.kernel_mode, args.seed))
    write_kernel_csv(kernel.gram(data.train), args.out)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    handlers = {"run": _cmd_run, "toy-gen": _cmd_toy, "kernel-dump": _cmd_dump}
    try:
        handlers[args.command](args)
    except ExperimentError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (DataError, ValueError, OSError) as exc:
        print(f"error: [{args.command}] {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
