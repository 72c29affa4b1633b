"""Prequential orchestration: stream, mask, normalize, render, learn, report.

One run walks the dataset once in file order, processing exactly one
instance at a time: mask the record, register colors for any features
appearing for the first time, fold observed values into the running
statistics, render the frame, predict with the model trained through
the previous instance, then reveal the label and update. Metrics come
at the end from the accumulated evaluation log.

Multiple runs use seeds cfg.seed + 0 .. cfg.seed + runs-1. Within a
run, three independent generator streams derive from the run seed by
fixed offsets (mod 2^64):

    mask    = run_seed
    palette = run_seed + 2^62
    weights = run_seed + 2^63

so ablations on one stage never perturb the draws of another.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Iterator

import numpy as np

from .datasets import (Instance, RawRecord, SimulatorConfig, apply_haphazard,
                       load_dense, load_sparse)
from .hi2f import FrameWriter
from .learner import DeskNet
from .metrics import EvaluationLog, MetricError, auprc, auroc, balanced_accuracy
from .palette import Palette
from .raster import render_bar, render_bar_x, render_pie
from .rng import MASK64, SplitMix64
from .streamstats import StreamNormalizer

PALETTE_SEED_OFFSET = 1 << 62
WEIGHTS_SEED_OFFSET = 1 << 63

DATA_FORMATS = ("dense", "sparse")
NORMALIZATIONS = ("zscore", "minmax")
REPRESENTATIONS = ("bar", "bar_x", "pie")
MODELS = ("desknet",)


class ExportError(OSError):
    """Frame export failed partway; frames_written counts complete frames."""

    def __init__(self, message: str, frames_written: int):
        super().__init__(f"{message} ({frames_written} frames written)")
        self.frames_written = frames_written


@dataclass(frozen=True)
class RunConfig:
    data_path: str
    data_format: str = "dense"
    positive_label: str = "1"
    p: float = 1.0
    seed: int = 0
    normalization: str = "zscore"
    representation: str = "bar"
    ff: float = 0.3
    model: str = "desknet"
    lr: float = 1e-3
    runs: int = 1
    output_path: str | None = None

    def __post_init__(self):
        if self.data_format not in DATA_FORMATS:
            raise ValueError(f"data_format must be one of {DATA_FORMATS}, got {self.data_format!r}")
        if not (0.0 < self.p <= 1.0):
            raise ValueError(f"p must lie in (0, 1], got {self.p}")
        if not 0 <= self.seed <= MASK64:
            raise ValueError(f"seed must be an unsigned 64-bit integer, got {self.seed}")
        if self.normalization not in NORMALIZATIONS:
            raise ValueError(
                f"normalization must be one of {NORMALIZATIONS}, got {self.normalization!r}"
            )
        if self.representation not in REPRESENTATIONS:
            raise ValueError(
                f"representation must be one of {REPRESENTATIONS}, got {self.representation!r}"
            )
        if self.ff <= 0:
            raise ValueError(f"ff must be positive, got {self.ff}")
        if self.model not in MODELS:
            raise ValueError(f"model must be one of {MODELS}, got {self.model!r}")
        if self.lr <= 0:
            raise ValueError(f"lr must be positive, got {self.lr}")
        if self.runs < 1:
            raise ValueError(f"runs must be at least 1, got {self.runs}")


def stream_seeds(cfg: RunConfig, run_index: int) -> tuple[int, int, int]:
    """(mask, palette, weights) seeds for one run, by the documented offsets."""
    run_seed = (cfg.seed + run_index) & MASK64
    return (
        run_seed,
        (run_seed + PALETTE_SEED_OFFSET) & MASK64,
        (run_seed + WEIGHTS_SEED_OFFSET) & MASK64,
    )


def _records(cfg: RunConfig) -> Iterator[RawRecord]:
    if cfg.data_format == "dense":
        return load_dense(cfg.data_path, label_column=-1, positive_label=cfg.positive_label)
    return load_sparse(cfg.data_path)


def iter_frames(cfg: RunConfig, run_index: int = 0) -> Iterator[tuple[int, int, np.ndarray]]:
    """Yield (timestep, label, frame) for one run, no learner involved."""
    mask_seed, palette_seed, _ = stream_seeds(cfg, run_index)
    mask_rng = SplitMix64(mask_seed)
    palette = Palette(palette_seed)
    normalizer = StreamNormalizer(cfg.normalization)
    sim = SimulatorConfig(p=cfg.p, seed=mask_seed)
    known: list[int] = []
    known_set: set[int] = set()
    for record in _records(cfg):
        instance = apply_haphazard(record, sim, mask_rng)
        for fid, _ in instance.observed:
            if fid not in known_set:
                known_set.add(fid)
                known.append(fid)
                palette.color_for(fid)
        normalized = normalizer.observe_many(instance.observed)
        if cfg.representation == "bar":
            frame = render_bar(normalized, palette, cfg.normalization, cfg.ff)
        elif cfg.representation == "bar_x":
            frame = render_bar_x(known, normalized, palette, cfg.normalization, cfg.ff)
        else:
            frame = render_pie(normalized, palette, cfg.normalization, cfg.ff)
        yield instance.timestep, instance.label, frame


def _build_model(cfg: RunConfig, weights_seed: int) -> DeskNet:
    return DeskNet(weights_seed, lr=cfg.lr)


def run_once(cfg: RunConfig, run_index: int = 0,
             model_factory: Callable[[int], object] | None = None) -> EvaluationLog:
    """One prequential pass; returns the full evaluation log."""
    _, _, weights_seed = stream_seeds(cfg, run_index)
    factory = model_factory or (lambda seed: _build_model(cfg, seed))
    model = factory(weights_seed)
    log = EvaluationLog()
    for timestep, label, frame in iter_frames(cfg, run_index):
        probability, _ = model.learn(frame, label, timestep)
        log.append(timestep, label, probability)
    return log


def aggregate_runs(per_run_metrics: list[tuple[float, float, float]]) -> dict:
    """Mean and sample std (n-1 denominator; 0 for a single run) per metric."""
    if not per_run_metrics:
        raise ValueError("need at least one run to aggregate")
    arr = np.asarray(per_run_metrics, dtype=np.float64)
    means = arr.mean(axis=0)
    if arr.shape[0] > 1:
        stds = arr.std(axis=0, ddof=1)
    else:
        stds = np.zeros(3)
    names = ("balanced_accuracy", "auroc", "auprc")
    return {name: {"mean": float(m), "std": float(s)}
            for name, m, s in zip(names, means, stds)}


def run_experiment(cfg: RunConfig,
                   model_factory: Callable[[int], object] | None = None) -> dict:
    """Execute cfg.runs prequential passes and aggregate their metrics.

    The report echoes the config, carries per-run wall times, and, when
    a run's log cannot support a metric (single-class stream), reports
    null metrics alongside the error messages instead of failing.
    """
    per_run: list[tuple[float, float, float]] = []
    wall_times: list[float] = []
    metric_errors: list[str] = []
    n_instances: int | None = None
    for run_index in range(cfg.runs):
        start = time.perf_counter()
        log = run_once(cfg, run_index, model_factory)
        wall_times.append(time.perf_counter() - start)
        if n_instances is None:
            n_instances = len(log)
        elif n_instances != len(log):
            raise RuntimeError(f"run {run_index} saw {len(log)} instances, expected {n_instances}")
        try:
            per_run.append((balanced_accuracy(log), auroc(log), auprc(log)))
        except MetricError as exc:
            metric_errors.append(f"run {run_index}: {exc}")
    if per_run and not metric_errors:
        aggregated = aggregate_runs(per_run)
    else:
        aggregated = {name: {"mean": None, "std": None}
                      for name in ("balanced_accuracy", "auroc", "auprc")}
    report = {
        "dataset": cfg.data_path,
        "format": cfg.data_format,
        "p": cfg.p,
        "seed": cfg.seed,
        "runs": cfg.runs,
        "normalization": cfg.normalization,
        "representation": cfg.representation,
        "ff": cfg.ff,
        "model": cfg.model,
        "lr": cfg.lr,
        "n_instances": n_instances if n_instances is not None else 0,
        "balanced_accuracy": aggregated["balanced_accuracy"],
        "auroc": aggregated["auroc"],
        "auprc": aggregated["auprc"],
        "wall_time_seconds": wall_times,
    }
    if metric_errors:
        report["metric_errors"] = metric_errors
    if cfg.output_path:
        write_report(report, cfg.output_path)
    return report


def write_report(report: dict, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as f:
        json.dump(report, f, indent=2)
        f.write("\n")


def export_frames(cfg: RunConfig, out_path: str | Path) -> int:
    """Write the run-0 frame stream as an HI2F file; returns frames written."""
    writer = None
    try:
        writer = FrameWriter(out_path)
        for timestep, label, frame in iter_frames(cfg, run_index=0):
            writer.write(timestep, label, frame)
        return writer.count
    except OSError as exc:
        written = writer.count if writer is not None else 0
        raise ExportError(str(exc), written) from exc
    finally:
        if writer is not None:
            writer.close()
