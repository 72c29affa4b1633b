"""Generate the shared metric parity fixture.

Emits 200 seeded random evaluation logs as JSON lines, each with
reference metric values computed here by deliberately naive methods:
AUROC by exhaustive pair counting with half credit for ties, AUPRC by
an explicit descending-threshold sweep, and balanced accuracy by
direct confusion-matrix arithmetic. The naive code is independent of
the barstream.metrics implementations on purpose; any implementation
is expected to match these numbers to tight tolerance.

Half the logs have probabilities quantized to one decimal so tie
handling is exercised; the other half use full-precision draws.
"""

from __future__ import annotations

import argparse
import json
from pathlib import Path

from barstream.rng import SplitMix64

N_LOGS = 200
MAX_LEN = 50
SEED = 971

def pair_count_auroc(labels: list[int], probs: list[float]) -> float:
    pos = [p for y, p in zip(labels, probs) if y == 1]
    neg = [p for y, p in zip(labels, probs) if y == 0]
    credit = 0.0
    for sp in pos:
        for sn in neg:
            if sp > sn:
                credit += 1.0
            elif sp == sn:
                credit += 0.5
    return credit / (len(pos) * len(neg))


def threshold_sweep_auprc(labels: list[int], probs: list[float]) -> float:
    n_pos = sum(labels)
    thresholds = sorted(set(probs), reverse=True)
    ap = 0.0
    prev_recall = 0.0
    for th in thresholds:
        tp = sum(1 for y, p in zip(labels, probs) if p >= th and y == 1)
        fp = sum(1 for y, p in zip(labels, probs) if p >= th and y == 0)
        recall = tp / n_pos
        precision = tp / (tp + fp)
        ap += (recall - prev_recall) * precision
        prev_recall = recall
    return ap


def confusion_balanced_accuracy(labels: list[int], probs: list[float]) -> float:
    tp = sum(1 for y, p in zip(labels, probs) if y == 1 and p >= 0.5)
    fn = sum(1 for y, p in zip(labels, probs) if y == 1 and p < 0.5)
    tn = sum(1 for y, p in zip(labels, probs) if y == 0 and p < 0.5)
    fp = sum(1 for y, p in zip(labels, probs) if y == 0 and p >= 0.5)
    return 0.5 * (tp / (tp + fn) + tn / (tn + fp))


def random_logs(seed: int = SEED, n_logs: int = N_LOGS, max_len: int = MAX_LEN):
    """Yield (labels, probs) pairs with both classes always present."""
    rng = SplitMix64(seed)
    for i in range(n_logs):
        length = 2 + rng.next_u64() % (max_len - 1)
        labels = [1 if u < 0.5 else 0 for u in rng.uniform_block(length).tolist()]
        labels[0], labels[1] = 1, 0
        probs = rng.uniform_block(length).tolist()
        if i % 2 == 0:
            probs = [round(p, 1) for p in probs]
        yield labels, probs


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="fixtures/metric_parity.jsonl")
    args = parser.parse_args(argv)

    Path(args.out).parent.mkdir(parents=True, exist_ok=True)
    with open(args.out, "w", encoding="utf-8") as f:
        for labels, probs in random_logs():
            row = {
                "labels": labels,
                "probs": probs,
                "auroc": pair_count_auroc(labels, probs),
                "auprc": threshold_sweep_auprc(labels, probs),
                "balanced_accuracy": confusion_balanced_accuracy(labels, probs),
            }
            f.write(json.dumps(row) + "\n")
    print(f"wrote {N_LOGS} logs to {args.out}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
