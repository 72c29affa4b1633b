"""Command-line front end: `barstream run` and `barstream export`."""

from __future__ import annotations

import argparse
import sys

from .harness import RunConfig, export_frames, run_experiment


def _add_stream_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--data", required=True, help="input dataset path")
    parser.add_argument("--format", required=True, choices=("dense", "sparse"),
                        help="dense CSV or sparse 'label idx:val' lines")
    parser.add_argument("--positive-label", default="1",
                        help="label cell mapped to class 1 (dense format only)")
    parser.add_argument("--p", required=True, type=float,
                        help="per-feature observation probability in (0, 1]")
    parser.add_argument("--seed", required=True, type=int, help="base run seed (u64)")
    parser.add_argument("--normalization", required=True, choices=("zscore", "minmax"))
    parser.add_argument("--representation", required=True, choices=("bar", "bar_x", "pie"))
    parser.add_argument("--ff", type=float, default=0.3, help="spacing fraction")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="barstream",
        description="Rasterize variable-dimension feature streams and train on them prequentially",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="prequential train/eval, JSON report out")
    _add_stream_flags(run)
    run.add_argument("--model", default="desknet", choices=("desknet",))
    run.add_argument("--lr", type=float, default=1e-3)
    run.add_argument("--runs", type=int, default=1)
    run.add_argument("--out", required=True, help="report JSON path")

    export = sub.add_parser("export", help="render the stream to an HI2F frame file")
    _add_stream_flags(export)
    export.add_argument("--out", required=True, help="output HI2F path")

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "run":
        cfg = RunConfig(
            data_path=args.data,
            data_format=args.format,
            positive_label=args.positive_label,
            p=args.p,
            seed=args.seed,
            normalization=args.normalization,
            representation=args.representation,
            ff=args.ff,
            model=args.model,
            lr=args.lr,
            runs=args.runs,
            output_path=args.out,
        )
        report = run_experiment(cfg)
        ba = report["balanced_accuracy"]["mean"]
        shown = "n/a" if ba is None else f"{ba:.4f}"
        print(f"{report['n_instances']} instances, balanced accuracy {shown}, "
              f"report -> {args.out}")
        return 0
    cfg = RunConfig(
        data_path=args.data,
        data_format=args.format,
        positive_label=args.positive_label,
        p=args.p,
        seed=args.seed,
        normalization=args.normalization,
        representation=args.representation,
        ff=args.ff,
    )
    count = export_frames(cfg, args.out)
    print(f"{count} frames -> {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
