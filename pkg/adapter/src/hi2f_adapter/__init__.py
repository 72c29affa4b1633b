"""Fine-tune pretrained vision models prequentially over HI2F frame streams."""

from .finetune import AdapterConfig, DivergenceError, Finetuner, online_finetune
from .frames import (FrameFormatError, count_frames, read_header,
                     stream_frames)
from .metrics import (MetricError, PredictionLog, auprc, auroc,
                      balanced_accuracy)
from .model import (CHANNEL_NORMALIZATIONS, MODEL_NAMES, WeightLoadError,
                    build_model, normalize_channels)

__version__ = "0.1.0"
