"""Training, validation, and testing of one experiment run.

The optimizer is plain gradient descent with momentum 0.9: exactly
reproducible, easy to reason about, and sufficient at desk scale. Runs are
deterministic for a fixed (config, seed) on a single device: parameter init,
negative sampling, and batch order all derive from the config seed, so a run
interrupted at an epoch boundary resumes to the same final state.
"""

from __future__ import annotations

import json
import logging
import math
import random
import shutil
import time
import uuid
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Optional

import torch
import yaml

from newsrec.config import ExperimentConfig
from newsrec.corpus.sampling import sample_training_pairs
from newsrec.corpus.types import ImpressionLog, UnifiedCorpus
from newsrec.errors import UserInputError
from newsrec.metrics import EvalResult, evaluate_impressions, write_prediction_file
from newsrec.models import CorpusTensors, Recommender, build_model, training_loss
from newsrec.runner.checkpoint import load_checkpoint, save_checkpoint
from newsrec.runner.tracking import SafeSink, TeeSink, TrackingEvent, TrackingSink, make_sink

logger = logging.getLogger(__name__)

LOSS_EVENT_EVERY = 50


@dataclass
class RunState:
    """Progress and outcome of one run; persisted into every checkpoint."""

    run_id: str
    seed: int
    phase: str = "idle"
    epoch: int = 0
    step: int = 0
    best_metric_name: str = "auc"
    best_dev_metric: float = float("-inf")
    best_epoch: int = 0
    checkpoint_paths: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "run_id": self.run_id,
            "seed": self.seed,
            "phase": self.phase,
            "epoch": self.epoch,
            "step": self.step,
            "best_metric_name": self.best_metric_name,
            "best_dev_metric": None if math.isinf(self.best_dev_metric) else self.best_dev_metric,
            "best_epoch": self.best_epoch,
            "checkpoint_paths": list(self.checkpoint_paths),
        }

    @staticmethod
    def from_dict(data: dict) -> "RunState":
        best = data.get("best_dev_metric")
        return RunState(
            run_id=data["run_id"],
            seed=data["seed"],
            phase=data.get("phase", "idle"),
            epoch=data.get("epoch", 0),
            step=data.get("step", 0),
            best_metric_name=data.get("best_metric_name", "auc"),
            best_dev_metric=float("-inf") if best is None else best,
            best_epoch=data.get("best_epoch", 0),
            checkpoint_paths=list(data.get("checkpoint_paths", [])),
        )


def epoch_seed(seed: int, epoch: int) -> int:
    """Per-epoch seed for sampling/shuffling; resume-safe by construction."""
    return seed * 100_003 + epoch


def iter_chunks(items: list, size: int):
    for start in range(0, len(items), size):
        yield items[start : start + size]


def evaluate_model(
    model: Recommender,
    impressions: list[ImpressionLog],
    tensors: CorpusTensors,
    batch_size: int = 64,
) -> tuple[Optional[EvalResult], list[tuple[str, list[float]]]]:
    """Score every impression in evaluation mode.

    Returns the aggregated metrics (None when no impression is labeled) plus
    per-impression score rows for prediction files.
    """
    if not impressions:
        raise UserInputError("cannot evaluate an empty split")
    model.eval()
    pairs: list[tuple[list[int], list[float]]] = []
    rows: list[tuple[str, list[float]]] = []
    with torch.no_grad():
        for chunk in iter_chunks(impressions, batch_size):
            batch = tensors.batch_from_impressions(chunk)
            scores = model(batch)
            for i, imp in enumerate(chunk):
                values = [float(v) for v in scores[i, : len(imp.candidates)]]
                rows.append((imp.impression_id, values))
                labels = [label for _, label in imp.candidates]
                if all(label is not None for label in labels):
                    pairs.append((labels, values))
    result = evaluate_impressions(pairs) if pairs else None
    return result, rows


class Trainer:
    """Owns the model, optimizer, and run directory for one experiment."""

    def __init__(
        self,
        config: ExperimentConfig,
        corpus: UnifiedCorpus,
        sink: Optional[TrackingSink] = None,
        progress_callback: Optional[Callable[[int, int, Optional[EvalResult]], None]] = None,
        extra_sink: Optional[TrackingSink] = None,
    ):
        self.config = config
        self.corpus = corpus
        self.fingerprint = config.fingerprint()
        self._explicit_sink = sink
        self._extra_sink = extra_sink
        self.progress_callback = progress_callback
        self.train_impressions = [imp for imp in corpus.splits["train"] if imp.labeled]
        if not self.train_impressions:
            raise UserInputError("training requires a non-empty labeled train split")
        torch.manual_seed(config.seed)
        self.tensors = CorpusTensors(corpus, config.title_len, config.history_len)
        self.model = build_model(config, corpus, self.tensors)
        self.optimizer = torch.optim.SGD(
            self.model.parameters(), lr=config.learning_rate, momentum=0.9
        )
        self.state: Optional[RunState] = None
        self.run_dir: Optional[Path] = None
        self.sink: Optional[TrackingSink] = None

    # -- run layout -------------------------------------------------------

    def _open_run(self, run_id: str) -> None:
        self.run_dir = Path(self.config.output_dir) / "runs" / run_id
        (self.run_dir / "checkpoints").mkdir(parents=True, exist_ok=True)
        if self._explicit_sink is not None:
            sink = self._explicit_sink
        else:
            sink = make_sink(
                self.config.tracking.sink,
                dict(self.config.tracking.options),
                self.run_dir / "tracking.jsonl",
            )
        if self._extra_sink is not None:
            sink = TeeSink(sink, self._extra_sink)
        self.sink = SafeSink(sink)
        config_path = self.run_dir / "config.yaml"
        if not config_path.exists():
            config_path.write_text(yaml.safe_dump(self.config.to_tree(), sort_keys=True), encoding="utf-8")

    def _emit(self, kind: str, name: str, value) -> None:
        assert self.state is not None and self.sink is not None
        self.sink.emit(
            TrackingEvent(
                run_id=self.state.run_id,
                wall_time=time.time(),
                step=self.state.step,
                kind=kind,
                name=name,
                value=value,
            )
        )

    def _set_phase(self, phase: str) -> None:
        assert self.state is not None
        self.state.phase = phase
        self._emit("status", "phase", phase)
        self.sink.flush()

    # -- optimization -----------------------------------------------------

    def _batch_loss(self, batch) -> torch.Tensor:
        scores = self.model(batch)
        return training_loss(scores[:, 0], scores[:, 1:])

    def _optimize(self, batch) -> float:
        plan = self.config.device_plan
        replicas = plan.n_workers if plan.kind == "simulated_data_parallel" else 1
        if replicas > 1 and batch.size % replicas == 0:
            return self._optimize_sharded(batch, replicas)
        self.model.train()
        self.optimizer.zero_grad(set_to_none=True)
        loss = self._batch_loss(batch)
        loss.backward()
        self.optimizer.step()
        return float(loss.detach())

    def _optimize_sharded(self, batch, replicas: int) -> float:
        """One update from ``replicas`` logical workers sharing parameters.

        Each replica sees one shard of the batch; per-replica gradients are
        averaged in fixed order and applied as a single optimizer step, which
        matches single-device large-batch training up to float reduction order.
        """
        self.model.train()
        shard = batch.size // replicas
        summed: Optional[list[torch.Tensor]] = None
        total_loss = 0.0
        for r in range(replicas):
            self.model.zero_grad(set_to_none=True)
            loss = self._batch_loss(batch.narrow(r * shard, shard))
            loss.backward()
            grads = [
                p.grad.detach().clone() if p.grad is not None else torch.zeros_like(p)
                for p in self.model.parameters()
            ]
            summed = grads if summed is None else [a + b for a, b in zip(summed, grads)]
            total_loss += float(loss.detach())
        assert summed is not None
        for param, grad in zip(self.model.parameters(), summed):
            param.grad = grad / replicas
        self.optimizer.step()
        return total_loss / replicas

    # -- train / validate / test -----------------------------------------

    def train(self, resume_from: Optional[str] = None, allow_mismatch: bool = False) -> RunState:
        config = self.config
        if resume_from is not None:
            payload = load_checkpoint(
                resume_from, expected_fingerprint=self.fingerprint, allow_mismatch=allow_mismatch
            )
            self.model.load_state_dict(payload["model_state"])
            if payload.get("optimizer_state") is not None:
                self.optimizer.load_state_dict(payload["optimizer_state"])
            self.state = RunState.from_dict(payload["run_state"])
            start_epoch = self.state.epoch + 1
        else:
            run_id = f"{self.fingerprint[:12]}-{uuid.uuid4().hex[:8]}"
            self.state = RunState(run_id=run_id, seed=config.seed)
            start_epoch = 1
        self._open_run(self.state.run_id)

        final_dev: Optional[EvalResult] = None
        for epoch in range(start_epoch, config.epochs + 1):
            self._set_phase("training")
            samples = sample_training_pairs(
                self.train_impressions,
                k=config.negatives,
                seed=epoch_seed(config.seed, epoch),
                history_len=config.history_len,
            )
            random.Random(epoch_seed(config.seed, epoch) + 7).shuffle(samples)
            epoch_losses: list[float] = []
            for chunk in iter_chunks(samples, config.batch_size):
                batch = self.tensors.batch_from_samples(chunk)
                loss_value = self._optimize(batch)
                self.state.step += 1
                epoch_losses.append(loss_value)
                if not math.isfinite(loss_value):
                    logger.error("non-finite loss at step %d; failing run", self.state.step)
                    self._set_phase("failed")
                    self._write_result(final_dev, None)
                    return self.state
                if self.state.step == 1 or self.state.step % LOSS_EVENT_EVERY == 0:
                    self._emit("scalar", "train/loss", loss_value)
            self.state.epoch = epoch
            self._emit("scalar", "train/epoch_loss", sum(epoch_losses) / len(epoch_losses))

            result: Optional[EvalResult] = None
            if self.corpus.splits["dev"]:
                self._set_phase("validating")
                result = self.validate()
                final_dev = result
                if result.auc is not None and result.auc > self.state.best_dev_metric:
                    self.state.best_dev_metric = result.auc
                    self.state.best_epoch = epoch

            checkpoint_path = self.run_dir / "checkpoints" / f"epoch_{epoch}.ckpt"
            self.state.checkpoint_paths.append(str(checkpoint_path))
            save_checkpoint(
                checkpoint_path,
                self.model,
                self.optimizer,
                self.state.to_dict(),
                config.to_tree(),
                self.fingerprint,
            )
            self._emit("artifact", "checkpoint", str(checkpoint_path))
            if result is not None and self.state.best_epoch == epoch:
                best_path = self.run_dir / "checkpoints" / "best.ckpt"
                shutil.copyfile(checkpoint_path, best_path)
                self._emit("artifact", "best_checkpoint", str(best_path))
            if self.progress_callback is not None:
                self.progress_callback(epoch, config.epochs, result)

        if final_dev is None and self.state.epoch >= config.epochs and self.corpus.splits["dev"]:
            # resumed past the last epoch: recompute dev metrics for the result file
            final_dev = self.validate()
        self._set_phase("finished")
        self._write_result(final_dev, None)
        self.sink.flush()
        return self.state

    def close(self) -> None:
        """Release the tracking sink once the trainer is fully done."""
        if self.sink is not None:
            self.sink.close()

    def validate(self) -> EvalResult:
        """Evaluate the dev split and emit its metrics as events."""
        result, _ = evaluate_model(
            self.model, self.corpus.splits["dev"], self.tensors, self.config.batch_size
        )
        if result is None:
            raise UserInputError("dev split has no labeled impressions")
        for name, value in (
            ("dev/auc", result.auc),
            ("dev/mrr", result.mrr),
            ("dev/ndcg5", result.ndcg5),
            ("dev/ndcg10", result.ndcg10),
        ):
            if value is not None:
                self._emit("scalar", name, value)
        return result

    def test(self, prediction_path: Optional[Path] = None) -> Optional[EvalResult]:
        """Evaluate the test split, or write a prediction file if unlabeled."""
        impressions = self.corpus.splits["test"]
        result, rows = evaluate_model(self.model, impressions, self.tensors, self.config.batch_size)
        if result is None:
            path = prediction_path or (self.run_dir or Path(".")) / "predictions_test.tsv"
            write_prediction_file(path, rows)
            if self.state is not None:
                self._emit("artifact", "prediction_file", str(path))
            return None
        return result

    def _write_result(self, dev: Optional[EvalResult], test: Optional[EvalResult]) -> None:
        assert self.state is not None and self.run_dir is not None
        best = None
        if not math.isinf(self.state.best_dev_metric):
            best = {
                "metric": self.state.best_metric_name,
                "value": self.state.best_dev_metric,
                "epoch": self.state.best_epoch,
            }
        payload = {
            "run_id": self.state.run_id,
            "model_name": self.config.model_name,
            "dataset_name": self.config.dataset_name,
            "fingerprint": self.fingerprint,
            "seed": self.config.seed,
            "status": self.state.phase,
            "epochs_completed": self.state.epoch,
            "best": best,
            "dev": dev.to_dict() if dev is not None else None,
            "test": test.to_dict() if test is not None else None,
        }
        (self.run_dir / "result.json").write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")


def train(
    config: ExperimentConfig,
    corpus: UnifiedCorpus,
    sink: Optional[TrackingSink] = None,
    resume_from: Optional[str] = None,
    progress_callback=None,
) -> RunState:
    """Train one experiment; convenience wrapper around :class:`Trainer`."""
    return Trainer(config, corpus, sink, progress_callback).train(resume_from=resume_from)


def run_data_parallel(
    config: ExperimentConfig,
    corpus: UnifiedCorpus,
    sink: Optional[TrackingSink] = None,
) -> RunState:
    """Train under the simulated data-parallel plan."""
    if config.device_plan.kind != "simulated_data_parallel":
        raise UserInputError("run_data_parallel requires device_plan.kind=simulated_data_parallel")
    return Trainer(config, corpus, sink).train()
