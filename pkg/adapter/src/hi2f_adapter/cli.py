"""Command-line front end: score and fine-tune over an HI2F file."""

from __future__ import annotations

import argparse
import sys

from .finetune import AdapterConfig, online_finetune
from .model import CHANNEL_NORMALIZATIONS, MODEL_NAMES


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hi2f-adapter",
        description="Fine-tune a pretrained vision model prequentially over an HI2F frame stream",
    )
    parser.add_argument("--frames", required=True, help="input HI2F path")
    parser.add_argument("--model", default="resnet34", choices=MODEL_NAMES)
    parser.add_argument("--lr", type=float, default=2e-5)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--channel-normalization", default="imagenet",
                        choices=CHANNEL_NORMALIZATIONS)
    parser.add_argument("--no-pretrained", action="store_true",
                        help="random initialization instead of pretrained weights")
    parser.add_argument("--weights", default=None,
                        help="local state-dict file used as the pretrained source")
    parser.add_argument("--out", required=True, help="report JSON path")
    parser.add_argument("--dump-log", default=None,
                        help="also write 'timestep,label,probability' lines here")
    parser.add_argument("--meta-p", type=float, default=None,
                        help="echo the export's observation probability into the report")
    parser.add_argument("--meta-normalization", default=None,
                        help="echo the export's normalization into the report")
    parser.add_argument("--meta-representation", default=None,
                        help="echo the export's representation into the report")
    parser.add_argument("--meta-ff", type=float, default=None,
                        help="echo the export's spacing fraction into the report")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    cfg = AdapterConfig(
        frames_path=args.frames,
        model_name=args.model,
        lr=args.lr,
        seed=args.seed,
        channel_normalization=args.channel_normalization,
        pretrained=not args.no_pretrained,
        weights_path=args.weights,
        output_path=args.out,
        log_path=args.dump_log,
        p=args.meta_p,
        normalization=args.meta_normalization,
        representation=args.meta_representation,
        ff=args.meta_ff,
    )
    report = online_finetune(cfg)
    ba = report["balanced_accuracy"]["mean"]
    shown = "n/a" if ba is None else f"{ba:.4f}"
    print(f"{report['n_instances']} frames, balanced accuracy {shown}, "
          f"report -> {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
