"""Streaming toolkit: haphazard tabular streams rendered as fixed-size
frames and classified prequentially by an online CNN."""

from .datasets import (Instance, RawRecord, SimulatorConfig, StreamFormatError,
                       apply_haphazard, haphazard_stream, load_dense, load_sparse,
                       write_dense, write_sparse)
from .harness import (ExportError, RunConfig, aggregate_runs, export_frames,
                      iter_frames, run_experiment, run_once, stream_seeds,
                      write_report)
from .hi2f import FrameFormatError, FrameWriter, count_frames, read_frames
from .learner import DeskNet, DivergenceError, bce_loss, init_desknet, learn_step
from .learner import predict as predict_frame
from .metrics import (EvaluationLog, MetricError, auprc, auroc, balanced_accuracy)
from .palette import (Palette, PaletteCheckpointError, PaletteExhaustedError)
from .raster import (LayoutSpec, baseline_row, downscale, layout, render_bar,
                     render_bar_x, render_pie, value_to_row)
from .rng import SplitMix64, mix64
from .streamstats import (FeatureStats, StreamNormalizer, normalize_minmax,
                          normalize_zscore)
from .synth import synthetic_records

__version__ = "0.1.0"
