"""Prediction log and the three stream metrics, computed independently.

Balanced accuracy comes from direct confusion counts at an inclusive
threshold; AUROC and average precision delegate to scikit-learn, which
groups tied scores the same way the exporting toolkit does. Agreement
with that toolkit is pinned to 1e-9 on a shared fixture of 200 logs.
"""

from __future__ import annotations

from pathlib import Path
from typing import Sequence

import numpy as np
from sklearn.metrics import average_precision_score, roc_auc_score


class MetricError(ValueError):
    """The log cannot support the requested metric."""


class PredictionLog:
    """Append-only (timestep, label, probability) record of one pass."""

    def __init__(self):
        self.entries: list[tuple[int, int, float]] = []

    def __len__(self) -> int:
        return len(self.entries)

    def append(self, timestep: int, label: int, probability: float) -> None:
        if self.entries and timestep <= self.entries[-1][0]:
            raise ValueError(
                f"timesteps must be strictly increasing, got {timestep} "
                f"after {self.entries[-1][0]}"
            )
        if label not in (0, 1):
            raise ValueError(f"label must be 0 or 1, got {label!r}")
        p = float(probability)
        if not 0.0 <= p <= 1.0:
            raise ValueError(f"probability must lie in [0, 1], got {p}")
        self.entries.append((int(timestep), int(label), p))

    def labels(self) -> list[int]:
        return [y for _, y, _ in self.entries]

    def probabilities(self) -> list[float]:
        return [p for _, _, p in self.entries]

    def dump(self, path: str | Path) -> None:
        """Write 'timestep,label,probability' lines, probability to 6 decimals."""
        with open(path, "w", encoding="utf-8") as f:
            for t, y, p in self.entries:
                f.write(f"{t},{y},{p:.6f}\n")


def _arrays(labels: Sequence[int], probs: Sequence[float]) -> tuple[np.ndarray, np.ndarray]:
    y = np.asarray(labels, dtype=np.int64)
    p = np.asarray(probs, dtype=np.float64)
    if y.size == 0:
        raise MetricError("empty log")
    if not ((y == 0).any() and (y == 1).any()):
        raise MetricError("log holds a single class; need both 0 and 1")
    return y, p


def balanced_accuracy(labels: Sequence[int], probs: Sequence[float],
                      threshold: float = 0.5) -> float:
    """Mean of the two class recalls with predictions p >= threshold."""
    y, p = _arrays(labels, probs)
    pred = p >= threshold
    tpr = float((pred & (y == 1)).sum()) / float((y == 1).sum())
    tnr = float((~pred & (y == 0)).sum()) / float((y == 0).sum())
    return 0.5 * (tpr + tnr)


def auroc(labels: Sequence[int], probs: Sequence[float]) -> float:
    y, p = _arrays(labels, probs)
    return float(roc_auc_score(y, p))


def auprc(labels: Sequence[int], probs: Sequence[float]) -> float:
    y, p = _arrays(labels, probs)
    return float(average_precision_score(y, p))
