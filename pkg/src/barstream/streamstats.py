"""Per-feature running statistics and online normalization.

Each feature id gets one accumulator carrying count, Welford
mean/deviation state, and running extrema, so mean and variance stay
numerically stable over arbitrarily long streams with no second pass.
Normalization is update-then-normalize: the current observation is
folded into the statistics first and then scored against them, so the
very first observation of a feature normalizes against a distribution
that already contains it.

Z-scores are clipped to [-3, 3] and fall back to 0 while the deviation
is undefined (fewer than two observations) or zero. Min-max maps onto
[0, 1] and falls back to 0.5 while the running range is degenerate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

ZSCORE_CLIP = 3.0
MODES = ("zscore", "minmax")


@dataclass
class FeatureStats:
    """Running count, mean, squared-deviation sum, and extrema for one feature."""

    k: int = 0
    mu: float = 0.0
    v: float = 0.0
    pmin: float = math.inf
    pmax: float = -math.inf

    def update(self, x: float) -> None:
        if not math.isfinite(x):
            raise ValueError(f"non-finite observation {x!r}")
        self.k += 1
        delta = x - self.mu
        self.mu += delta / self.k
        self.v += delta * (x - self.mu)
        if x < self.pmin:
            self.pmin = x
        if x > self.pmax:
            self.pmax = x

    @property
    def variance(self) -> float:
        """Unbiased sample variance; 0.0 until two observations exist."""
        if self.k < 2:
            return 0.0
        return self.v / (self.k - 1)

    @property
    def sigma(self) -> float:
        return math.sqrt(self.variance)


def normalize_zscore(stats: FeatureStats, x: float) -> float:
    """Standard score of x against stats (already including x), clipped to [-3, 3]."""
    sigma = stats.sigma
    if sigma == 0.0:
        return 0.0
    z = (x - stats.mu) / sigma
    return max(-ZSCORE_CLIP, min(ZSCORE_CLIP, z))


def normalize_minmax(stats: FeatureStats, x: float) -> float:
    """Position of x within the running range; 0.5 when the range is degenerate."""
    span = stats.pmax - stats.pmin
    if span == 0.0:
        return 0.5
    return (x - stats.pmin) / span


@dataclass
class StreamNormalizer:
    """Online normalizer over a growing, sparsely observed feature space."""

    mode: str = "zscore"
    table: dict[int, FeatureStats] = field(default_factory=dict)

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")

    def observe(self, feature_id: int, x: float) -> float:
        """Fold x into feature_id's statistics, then return its normalized value."""
        stats = self.table.setdefault(feature_id, FeatureStats())
        stats.update(x)
        if self.mode == "zscore":
            return normalize_zscore(stats, x)
        return normalize_minmax(stats, x)

    def observe_many(self, observed: tuple[tuple[int, float], ...]) -> tuple[tuple[int, float], ...]:
        """Normalize one instance's (feature_id, value) pairs in order."""
        return tuple((fid, self.observe(fid, x)) for fid, x in observed)

    def seen(self, feature_id: int) -> int:
        stats = self.table.get(feature_id)
        return 0 if stats is None else stats.k

    @property
    def known_features(self) -> list[int]:
        return sorted(self.table)

    def dump(self, path: str | Path) -> None:
        """Debug dump, one 'feature_id k mu v pmin pmax' line per feature."""
        with open(path, "w", encoding="utf-8") as f:
            for fid in sorted(self.table):
                s = self.table[fid]
                f.write(f"{fid} {s.k} {s.mu!r} {s.v!r} {s.pmin!r} {s.pmax!r}\n")
