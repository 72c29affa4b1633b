"""Write a seeded synthetic stream to a dense or sparse file.

Used to (re)generate the bundled fixtures; running it twice with the
same arguments produces byte-identical files.
"""

from __future__ import annotations

import argparse
from pathlib import Path

from barstream.datasets import write_dense, write_sparse
from barstream.synth import synthetic_records


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--n", type=int, default=2000, help="number of records")
    parser.add_argument("--seed", type=int, default=20240817, help="stream seed")
    parser.add_argument("--features", type=int, default=2, help="feature count")
    parser.add_argument("--label-rule", choices=("sign", "median"), default="sign")
    parser.add_argument("--format", choices=("dense", "sparse"), default="dense")
    parser.add_argument("--out", required=True, help="output path")
    args = parser.parse_args(argv)

    records = synthetic_records(args.n, args.seed, n_features=args.features,
                                label_rule=args.label_rule)
    Path(args.out).parent.mkdir(parents=True, exist_ok=True)
    writer = write_dense if args.format == "dense" else write_sparse
    n = writer(records, args.out)
    print(f"wrote {n} records to {args.out}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
