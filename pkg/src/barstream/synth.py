"""Seeded synthetic streams with a label tied to one feature's value.

The generator produces a deliberately nonstationary two-phase stream
built around a single signal feature; every other feature is a scaled
copy of it, so each bar in a rendered frame carries the same class
information at a different amplitude.

Phase one (the warmup) is imbalanced and small-scale: nine records in
ten carry a small positive signal value, the rest a moderate negative
one. It settles the running statistics on a tight positive-leaning
range, which standardizes the rare negatives near the lower clip
bound: negative records render as tall bars, positive ones as stubs.

Phase two is balanced but scale-drifting: classes arrive 50/50 and the
negative magnitude doubles every few hundred records. The running
standard deviation chases the drift and never catches up, so
standardized negatives stay pinned at the clip bound while positives
standardize to ever smaller values. The two classes therefore keep
rendering bars of sharply different total length for the entire
stream, instead of washing out as the balanced mixture accumulates.

Labels come from one of two rules applied to the signal value:
"sign" labels a record 1 exactly when the value is positive; "median"
labels it 1 exactly when the value exceeds the running median of all
previous signal values (the first record falls back to the sign rule).
Under the median rule the warmup labels are effectively coin flips
inside the majority cluster, so callers that need clean early labels
should prefer "sign"; by the drift phase both rules agree on cluster
membership when drift_positive_value places positives above the lagged
median.
"""

from __future__ import annotations

from bisect import insort
from typing import Iterator

from .datasets import RawRecord
from .rng import SplitMix64

WARMUP = 500
WARMUP_POSITIVE_FRACTION = 0.9
POSITIVE_VALUE = 0.3
NEGATIVE_VALUE = -1.0
DRIFT_START = -5.0
DRIFT_DOUBLING = 400.0
JITTER = 0.05
FEATURE_SCALE = 0.8


def synthetic_records(
    n: int,
    seed: int,
    n_features: int = 2,
    label_rule: str = "sign",
    drift_positive_value: float | None = None,
) -> Iterator[RawRecord]:
    """Yield n records of the two-phase stream described in the module docs.

    The signal is the last feature; feature j < n_features - 1 holds the
    signal scaled by FEATURE_SCALE ** (n_features - 1 - j). Each record
    consumes exactly two generator draws (class pick and jitter), so the
    stream is a pure function of (n, seed, n_features, label_rule,
    drift_positive_value).
    """
    if n < 0:
        raise ValueError(f"n must be non-negative, got {n}")
    if n_features < 1:
        raise ValueError(f"need at least one feature, got {n_features}")
    if label_rule not in ("sign", "median"):
        raise ValueError(f"label_rule must be 'sign' or 'median', got {label_rule!r}")
    rng = SplitMix64(seed)
    history: list[float] = []
    for t in range(n):
        u_class, u_jitter = rng.uniform_block(2).tolist()
        jitter = 1.0 + JITTER * (2.0 * u_jitter - 1.0)
        if t < WARMUP:
            positive_fraction = WARMUP_POSITIVE_FRACTION
            positive, negative = POSITIVE_VALUE, NEGATIVE_VALUE
        else:
            positive_fraction = 0.5
            positive = POSITIVE_VALUE if drift_positive_value is None else drift_positive_value
            negative = DRIFT_START * 2.0 ** ((t - WARMUP) / DRIFT_DOUBLING)
        x = positive * jitter if u_class < positive_fraction else negative * jitter
        if label_rule == "sign" or not history:
            label = 1 if x > 0.0 else 0
        else:
            mid = len(history) // 2
            if len(history) % 2:
                median = history[mid]
            else:
                median = 0.5 * (history[mid - 1] + history[mid])
            label = 1 if x > median else 0
        if label_rule == "median":
            insort(history, x)
        values = tuple(
            (j, x * FEATURE_SCALE ** (n_features - 1 - j)) for j in range(n_features)
        )
        yield RawRecord(timestep=t, values=values, label=label)
