"""Prequential fine-tuning of a pretrained backbone over an HI2F stream.

Every frame is scored before its label is used: one forward pass,
record P(class 1), then a single plain SGD step on binary cross-entropy
(batch size 1, no momentum, no scheduler). lr = 0 freezes the model and
just scores the stream. The report mirrors the exporting toolkit's JSON
schema; fields describing how the frames were produced (p,
normalization, representation, ff) are null unless supplied.
"""

from __future__ import annotations

import contextlib
import json
import math
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import torch
import torch.nn.functional as F

from .frames import read_header, stream_frames
from .metrics import MetricError, PredictionLog, auprc, auroc, balanced_accuracy
from .model import (CHANNEL_NORMALIZATIONS, MODEL_NAMES, build_model,
                    normalize_channels)

MASK64 = (1 << 64) - 1
METRIC_NAMES = ("balanced_accuracy", "auroc", "auprc")


class DivergenceError(RuntimeError):
    """Fine-tuning produced a non-finite activation."""

    def __init__(self, message: str, timestep: int | None = None):
        if timestep is not None:
            message = f"{message} at timestep {timestep}"
        super().__init__(message)
        self.timestep = timestep


@dataclass(frozen=True)
class AdapterConfig:
    frames_path: str
    model_name: str = "resnet34"
    lr: float = 2e-5
    seed: int = 0
    channel_normalization: str = "imagenet"
    pretrained: bool = True
    weights_path: str | None = None
    output_path: str | None = None
    log_path: str | None = None
    p: float | None = None
    normalization: str | None = None
    representation: str | None = None
    ff: float | None = None

    def __post_init__(self):
        if self.model_name not in MODEL_NAMES:
            raise ValueError(
                f"model_name must be one of {MODEL_NAMES}, got {self.model_name!r}"
            )
        if not (math.isfinite(self.lr) and self.lr >= 0.0):
            raise ValueError(f"lr must be finite and non-negative, got {self.lr}")
        if not 0 <= self.seed <= MASK64:
            raise ValueError(f"seed must be an unsigned 64-bit integer, got {self.seed}")
        if self.channel_normalization not in CHANNEL_NORMALIZATIONS:
            raise ValueError(
                f"channel_normalization must be one of {CHANNEL_NORMALIZATIONS}, "
                f"got {self.channel_normalization!r}"
            )
        read_header(self.frames_path)


class Finetuner:
    """Owns the model and optimizer; step() scores, then updates."""

    def __init__(self, cfg: AdapterConfig):
        self.cfg = cfg
        torch.manual_seed(cfg.seed)
        self.model = build_model(cfg.model_name, cfg.pretrained, cfg.weights_path)
        self.model.train()
        self.optimizer = torch.optim.SGD(self.model.parameters(), lr=cfg.lr)

    def step(self, timestep: int, label: int, frame: np.ndarray) -> tuple[float, float]:
        """Probability and loss for one frame; parameters update afterwards."""
        if label not in (0, 1):
            raise ValueError(f"label must be 0 or 1, got {label!r}")
        # copy: reader frames are backed by read-only buffers
        x = torch.from_numpy(np.array(frame, dtype=np.float32))
        x = normalize_channels(x, self.cfg.channel_normalization).unsqueeze(0)
        update = self.cfg.lr > 0.0
        grad_mode = contextlib.nullcontext() if update else torch.no_grad()
        with grad_mode:
            logit = self.model(x).reshape(())
            loss_t = F.binary_cross_entropy_with_logits(
                logit, torch.tensor(float(label)))
        probability = torch.sigmoid(logit.detach()).item()
        loss = float(loss_t.detach().item())
        if not (math.isfinite(probability) and math.isfinite(loss)):
            raise DivergenceError("non-finite activation", timestep)
        if update:
            self.optimizer.zero_grad()
            loss_t.backward()
            self.optimizer.step()
        return probability, loss

    def state_dict(self) -> dict:
        return {k: v.detach().clone() for k, v in self.model.state_dict().items()}

    def load_state_dict(self, state: dict) -> None:
        self.model.load_state_dict(state)


def online_finetune(cfg: AdapterConfig) -> dict:
    """One prequential pass over the frame file; returns the report dict."""
    start = time.perf_counter()
    tuner = Finetuner(cfg)
    log = PredictionLog()
    for timestep, label, frame in stream_frames(cfg.frames_path):
        probability, _ = tuner.step(timestep, label, frame)
        log.append(timestep, label, probability)
    wall = time.perf_counter() - start

    metric_errors: list[str] = []
    try:
        values = (balanced_accuracy(log.labels(), log.probabilities()),
                  auroc(log.labels(), log.probabilities()),
                  auprc(log.labels(), log.probabilities()))
        aggregated = {name: {"mean": v, "std": 0.0}
                      for name, v in zip(METRIC_NAMES, values)}
    except MetricError as exc:
        metric_errors.append(f"run 0: {exc}")
        aggregated = {name: {"mean": None, "std": None} for name in METRIC_NAMES}

    report = {
        "dataset": cfg.frames_path,
        "format": "hi2f",
        "p": cfg.p,
        "seed": cfg.seed,
        "runs": 1,
        "normalization": cfg.normalization,
        "representation": cfg.representation,
        "ff": cfg.ff,
        "model": cfg.model_name,
        "lr": cfg.lr,
        "n_instances": len(log),
        "balanced_accuracy": aggregated["balanced_accuracy"],
        "auroc": aggregated["auroc"],
        "auprc": aggregated["auprc"],
        "wall_time_seconds": [wall],
    }
    if metric_errors:
        report["metric_errors"] = metric_errors
    if cfg.log_path:
        log.dump(cfg.log_path)
    if cfg.output_path:
        with open(cfg.output_path, "w", encoding="utf-8") as f:
            json.dump(report, f, indent=2)
            f.write("\n")
    return report
