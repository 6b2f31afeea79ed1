"""Experiment execution: training phases, checkpoints, tracking, run discovery."""

from newsrec.runner.checkpoint import CHECKPOINT_SCHEMA_VERSION, load_checkpoint, save_checkpoint
from newsrec.runner.runs import list_runs, read_run_summary, run_dirs
from newsrec.runner.tracking import (
    FileSink,
    MemorySink,
    NullSink,
    SafeSink,
    TeeSink,
    TrackingEvent,
    TrackingSink,
    make_sink,
    read_tracking_file,
)
from newsrec.runner.training import (
    RunState,
    Trainer,
    epoch_seed,
    evaluate_model,
    run_data_parallel,
    train,
)

__all__ = [
    "Trainer",
    "RunState",
    "train",
    "run_data_parallel",
    "evaluate_model",
    "epoch_seed",
    "save_checkpoint",
    "load_checkpoint",
    "CHECKPOINT_SCHEMA_VERSION",
    "TrackingEvent",
    "TrackingSink",
    "FileSink",
    "NullSink",
    "MemorySink",
    "TeeSink",
    "SafeSink",
    "make_sink",
    "read_tracking_file",
    "list_runs",
    "read_run_summary",
    "run_dirs",
]
