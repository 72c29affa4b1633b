"""Tabular stream loaders and the haphazard-input simulator.

Dense files are comma-separated rows with one label column; sparse files
use the classic "label idx:val ..." text format with 1-based indices.
Both loaders yield records one at a time, never holding the file
resident. The simulator masks each feature of a record independently
with probability p from a dedicated seeded generator, one draw per
(record, feature) in feature order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator, TextIO

from .rng import MASK64, SplitMix64


class StreamFormatError(ValueError):
    """Raised when an input file violates the dense or sparse format."""


@dataclass(frozen=True)
class RawRecord:
    """One full-feature-space row of the stream before masking."""

    timestep: int
    values: tuple[tuple[int, float], ...]
    label: int

    def __post_init__(self):
        if self.timestep < 0:
            raise ValueError(f"timestep must be non-negative, got {self.timestep}")
        if self.label not in (0, 1):
            raise ValueError(f"label must be 0 or 1, got {self.label!r}")
        prev = -1
        for fid, _ in self.values:
            if fid <= prev:
                raise ValueError(f"feature ids must be strictly increasing, got {fid} after {prev}")
            prev = fid


@dataclass(frozen=True)
class Instance:
    """The observed (post-mask) slice of one record."""

    timestep: int
    observed: tuple[tuple[int, float], ...]
    label: int

    def __post_init__(self):
        if self.timestep < 0:
            raise ValueError(f"timestep must be non-negative, got {self.timestep}")
        if self.label not in (0, 1):
            raise ValueError(f"label must be 0 or 1, got {self.label!r}")
        prev = -1
        for fid, _ in self.observed:
            if fid <= prev:
                raise ValueError(f"feature ids must be strictly increasing, got {fid} after {prev}")
            prev = fid

    @property
    def d(self) -> int:
        return len(self.observed)


@dataclass(frozen=True)
class SimulatorConfig:
    """Feature-availability probability and the mask stream seed."""

    p: float
    seed: int

    def __post_init__(self):
        if not (0.0 < self.p <= 1.0):
            raise ValueError(f"p must lie in (0, 1], got {self.p}")
        if not 0 <= self.seed <= MASK64:
            raise ValueError(f"seed must be an unsigned 64-bit integer, got {self.seed}")


def _parse_cell(cell: str, row: int, col: int) -> float:
    try:
        value = float(cell)
    except ValueError:
        raise StreamFormatError(
            f"row {row}, column {col}: could not parse {cell!r} as a real number"
        ) from None
    if not math.isfinite(value):
        raise StreamFormatError(f"row {row}, column {col}: non-finite value {cell!r}")
    return value


def load_dense(
    path: str | Path,
    label_column: int = -1,
    positive_label: str = "1",
    has_header: bool = False,
) -> Iterator[RawRecord]:
    """Stream comma-separated rows as RawRecords.

    Row index (after an optional header) becomes the timestep; the label
    is 1 iff the label cell equals positive_label. Every row must have
    the same column count.
    """
    with open(path, "r", encoding="utf-8") as f:
        if has_header:
            f.readline()
        expected_cols: int | None = None
        for row, line in enumerate(f):
            line = line.rstrip("\n").rstrip("\r")
            if line == "" and expected_cols is None:
                continue  # tolerate a trailing blank line on an empty file
            cells = line.split(",")
            if expected_cols is None:
                expected_cols = len(cells)
                if expected_cols < 2:
                    raise StreamFormatError(f"row {row}: need at least one feature column and a label")
            elif len(cells) != expected_cols:
                raise StreamFormatError(
                    f"row {row}: expected {expected_cols} columns, found {len(cells)}"
                )
            lcol = label_column if label_column >= 0 else expected_cols + label_column
            if not 0 <= lcol < expected_cols:
                raise StreamFormatError(
                    f"label column {label_column} out of range for {expected_cols} columns"
                )
            label = 1 if cells[lcol].strip() == positive_label else 0
            values = []
            fid = 0
            for col, cell in enumerate(cells):
                if col == lcol:
                    continue
                values.append((fid, _parse_cell(cell.strip(), row, col)))
                fid += 1
            yield RawRecord(timestep=row, values=tuple(values), label=label)


def write_dense(
    records: Iterable[RawRecord],
    path: str | Path,
    label_column: int = -1,
    positive_label: str = "1",
    negative_label: str = "0",
) -> int:
    """Serialize records back to the dense comma-separated format."""
    n = 0
    with open(path, "w", encoding="utf-8") as f:
        for rec in records:
            cells = [repr(float(v)) for _, v in rec.values]
            lcol = label_column if label_column >= 0 else len(cells) + 1 + label_column
            cells.insert(lcol, positive_label if rec.label == 1 else negative_label)
            f.write(",".join(cells) + "\n")
            n += 1
    return n


def load_sparse(path: str | Path) -> Iterator[RawRecord]:
    """Stream "label idx:val ..." lines as densified RawRecords.

    Labels +1 -> 1 and -1 -> 0; 1-based indices become 0-based feature
    ids. Indices a line leaves out are materialized as 0.0 up to the
    largest index seen anywhere in the file so far, so the dense width
    grows as later lines reveal more of the feature space.
    """
    with open(path, "r", encoding="utf-8") as f:
        width = 0
        timestep = 0
        for lineno, line in enumerate(f, start=1):
            line = line.strip()
            if line == "":
                if timestep == 0:
                    continue
                raise StreamFormatError(f"line {lineno}: blank line inside sparse stream")
            tokens = line.split()
            try:
                raw_label = int(tokens[0])
            except ValueError:
                raise StreamFormatError(
                    f"line {lineno}: label token {tokens[0]!r} is not +1/-1"
                ) from None
            if raw_label == 1:
                label = 1
            elif raw_label == -1:
                label = 0
            else:
                raise StreamFormatError(f"line {lineno}: label must be +1 or -1, got {raw_label}")
            present: dict[int, float] = {}
            prev_idx = 0
            for token in tokens[1:]:
                idx_str, sep, val_str = token.partition(":")
                if not sep:
                    raise StreamFormatError(f"line {lineno}: malformed pair {token!r}")
                try:
                    idx = int(idx_str)
                    value = float(val_str)
                except ValueError:
                    raise StreamFormatError(f"line {lineno}: malformed pair {token!r}") from None
                if not math.isfinite(value):
                    raise StreamFormatError(f"line {lineno}: non-finite value in pair {token!r}")
                if idx < 1:
                    raise StreamFormatError(f"line {lineno}: index {idx} is not 1-based positive")
                if idx <= prev_idx:
                    raise StreamFormatError(
                        f"line {lineno}: indices must be strictly increasing, got {idx} after {prev_idx}"
                    )
                prev_idx = idx
                present[idx - 1] = value
            width = max(width, prev_idx)
            values = tuple((j, present.get(j, 0.0)) for j in range(width))
            yield RawRecord(timestep=timestep, values=values, label=label)
            timestep += 1


def write_sparse(records: Iterable[RawRecord], path: str | Path) -> int:
    """Serialize records to sparse lines, dropping zero-valued features."""
    n = 0
    with open(path, "w", encoding="utf-8") as f:
        for rec in records:
            tokens = ["+1" if rec.label == 1 else "-1"]
            tokens.extend(f"{fid + 1}:{float(value)!r}" for fid, value in rec.values if value != 0.0)
            f.write(" ".join(tokens) + "\n")
            n += 1
    return n


def apply_haphazard(record: RawRecord, cfg: SimulatorConfig, rng: SplitMix64) -> Instance:
    """Keep each feature independently with probability p, in feature order.

    Consumes exactly len(record.values) draws from rng, one per feature,
    so the mask sequence is a pure function of (stream, p, seed).
    """
    draws = rng.uniform_block(len(record.values))
    observed = tuple(fv for fv, u in zip(record.values, draws) if u < cfg.p)
    return Instance(timestep=record.timestep, observed=observed, label=record.label)


def haphazard_stream(records: Iterable[RawRecord], cfg: SimulatorConfig) -> Iterator[Instance]:
    """Mask a record stream with a fresh generator seeded from cfg.seed."""
    rng = SplitMix64(cfg.seed)
    for record in records:
        yield apply_haphazard(record, cfg, rng)
