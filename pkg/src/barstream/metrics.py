"""Prequential evaluation log and end-of-stream ranking metrics.

The log accumulates one (timestep, label, probability) entry per
processed instance; metrics are computed once, after the stream ends.
AUROC uses the rank-sum formulation with average ranks for ties, and
AUPRC is average precision (step interpolation) with tied scores
grouped into one threshold.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np


class MetricError(ValueError):
    """The log cannot support the requested metric (e.g. one class only)."""


@dataclass
class EvaluationLog:
    entries: list[tuple[int, int, float]] = field(default_factory=list)

    def append(self, timestep: int, label: int, probability: float) -> None:
        if self.entries and timestep <= self.entries[-1][0]:
            raise ValueError(
                f"timesteps must be strictly increasing, got {timestep} after {self.entries[-1][0]}"
            )
        if label not in (0, 1):
            raise ValueError(f"label must be 0 or 1, got {label!r}")
        p = float(probability)
        if not (math.isfinite(p) and 0.0 <= p <= 1.0):
            raise ValueError(f"probability must lie in [0, 1], got {probability!r}")
        self.entries.append((timestep, label, p))

    def __len__(self) -> int:
        return len(self.entries)

    def labels(self) -> np.ndarray:
        return np.asarray([y for _, y, _ in self.entries], dtype=np.int64)

    def probabilities(self) -> np.ndarray:
        return np.asarray([p for _, _, p in self.entries], dtype=np.float64)

    def tail(self, n: int) -> "EvaluationLog":
        """A new log holding only the final n entries."""
        return EvaluationLog(entries=self.entries[-n:])

    def dump(self, path: str | Path) -> None:
        """Write 'timestep,label,probability' lines with 6-decimal probabilities."""
        with open(path, "w", encoding="utf-8") as f:
            for t, y, p in self.entries:
                f.write(f"{t},{y},{p:.6f}\n")

    @classmethod
    def load(cls, path: str | Path) -> "EvaluationLog":
        log = cls()
        with open(path, "r", encoding="utf-8") as f:
            for line in f:
                t, y, p = line.strip().split(",")
                log.append(int(t), int(y), float(p))
        return log


def _split_classes(log: EvaluationLog) -> tuple[np.ndarray, np.ndarray]:
    y = log.labels()
    s = log.probabilities()
    if not (y == 1).any():
        raise MetricError("log contains no positive (label 1) entries")
    if not (y == 0).any():
        raise MetricError("log contains no negative (label 0) entries")
    return y, s


def balanced_accuracy(log: EvaluationLog, threshold: float = 0.5) -> float:
    """(TPR + TNR) / 2 with class 1 predicted when probability >= threshold."""
    y, s = _split_classes(log)
    pred = s >= threshold
    pos = y == 1
    tpr = float(pred[pos].mean())
    tnr = float((~pred[~pos]).mean())
    return (tpr + tnr) / 2.0


def _average_ranks(values: np.ndarray) -> np.ndarray:
    """1-based ranks; tied values share the mean of their rank block."""
    order = np.argsort(values, kind="mergesort")
    sorted_vals = values[order]
    n = len(values)
    boundaries = np.flatnonzero(np.diff(sorted_vals)) + 1
    starts = np.concatenate(([0], boundaries))
    ends = np.concatenate((boundaries, [n]))
    ranks = np.empty(n, dtype=np.float64)
    for start, end in zip(starts, ends):
        ranks[order[start:end]] = (start + 1 + end) / 2.0
    return ranks


def auroc(log: EvaluationLog) -> float:
    """Probability a random positive outranks a random negative (ties count 1/2)."""
    y, s = _split_classes(log)
    ranks = _average_ranks(s)
    n_pos = int((y == 1).sum())
    n_neg = len(y) - n_pos
    rank_sum = float(ranks[y == 1].sum())
    return (rank_sum - n_pos * (n_pos + 1) / 2.0) / (n_pos * n_neg)


def auprc(log: EvaluationLog) -> float:
    """Average precision over descending-score thresholds, tied scores grouped."""
    y = log.labels()
    s = log.probabilities()
    total_pos = int((y == 1).sum())
    if total_pos == 0:
        raise MetricError("log contains no positive (label 1) entries")
    order = np.argsort(-s, kind="mergesort")
    y_sorted = y[order]
    s_sorted = s[order]
    group_ends = np.concatenate((np.flatnonzero(np.diff(s_sorted)) + 1, [len(y)]))
    tp = np.cumsum(y_sorted)[group_ends - 1]
    seen = group_ends
    precision = tp / seen
    recall = tp / total_pos
    prev_recall = np.concatenate(([0.0], recall[:-1]))
    return float(np.sum((recall - prev_recall) * precision))
