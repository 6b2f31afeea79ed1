"""Background job execution for the control API.

Jobs run on worker threads: one lane for training/evaluation (serialized, so
at most one training job runs at a time) and one lane for data jobs. Each job
owns an in-memory event buffer that the SSE endpoint streams from; training
jobs tee their tracking events into that buffer alongside the tracking file.
"""

from __future__ import annotations

import logging
import queue
import threading
import time
import uuid
from dataclasses import dataclass, field
from typing import Callable, Optional

from newsrec.errors import NewsrecError
from newsrec.runner.tracking import MemorySink

logger = logging.getLogger(__name__)

JOB_KINDS = ("download", "preprocess", "train", "evaluate")
TERMINAL = ("finished", "failed")

# lane assignment: training and evaluation share the serialized model lane
_LANES = {"train": "model", "evaluate": "model", "download": "data", "preprocess": "data"}


@dataclass
class JobRecord:
    job_id: str
    kind: str
    status: str = "queued"
    progress: float = 0.0
    created: float = field(default_factory=time.time)
    updated: float = field(default_factory=time.time)
    params: dict = field(default_factory=dict)
    result: Optional[dict] = None
    error: Optional[str] = None

    def to_dict(self) -> dict:
        return {
            "job_id": self.job_id,
            "kind": self.kind,
            "status": self.status,
            "progress": self.progress,
            "created": self.created,
            "updated": self.updated,
            "params": self.params,
            "result": self.result,
            "error": self.error,
        }


class JobManager:
    def __init__(self, model_workers: int = 1, data_workers: int = 1):
        self._lock = threading.Lock()
        self.jobs: dict[str, JobRecord] = {}
        self.buffers: dict[str, MemorySink] = {}
        self._queues: dict[str, queue.Queue] = {"model": queue.Queue(), "data": queue.Queue()}
        self._stop = threading.Event()
        self._threads: list[threading.Thread] = []
        for lane, count in (("model", model_workers), ("data", data_workers)):
            for i in range(count):
                thread = threading.Thread(
                    target=self._worker, args=(lane,), name=f"job-{lane}-{i}", daemon=True
                )
                thread.start()
                self._threads.append(thread)

    def submit(self, kind: str, params: dict, fn: Callable[["JobHandle"], dict]) -> str:
        if kind not in JOB_KINDS:
            raise ValueError(f"unknown job kind {kind!r}")
        job_id = uuid.uuid4().hex[:12]
        record = JobRecord(job_id=job_id, kind=kind, params=params)
        with self._lock:
            self.jobs[job_id] = record
            self.buffers[job_id] = MemorySink()
        self._queues[_LANES[kind]].put((job_id, fn))
        return job_id

    def get(self, job_id: str) -> Optional[JobRecord]:
        with self._lock:
            return self.jobs.get(job_id)

    def list(self) -> list[JobRecord]:
        with self._lock:
            return sorted(self.jobs.values(), key=lambda j: j.created)

    def buffer(self, job_id: str) -> Optional[MemorySink]:
        with self._lock:
            return self.buffers.get(job_id)

    def update(self, job_id: str, status: Optional[str] = None, progress: Optional[float] = None) -> None:
        with self._lock:
            record = self.jobs[job_id]
            if status is not None:
                record.status = status
            if progress is not None:
                # progress is monotone nondecreasing by contract
                record.progress = max(record.progress, min(1.0, progress))
            record.updated = time.time()

    def shutdown(self, timeout: float = 2.0) -> None:
        self._stop.set()
        for thread in self._threads:
            thread.join(timeout)

    def wait(self, job_id: str, timeout: float = 60.0) -> JobRecord:
        """Block until the job reaches a terminal status (test helper)."""
        deadline = time.time() + timeout
        while time.time() < deadline:
            record = self.get(job_id)
            if record is not None and record.status in TERMINAL:
                return record
            time.sleep(0.02)
        raise TimeoutError(f"job {job_id} did not finish within {timeout}s")

    def _worker(self, lane: str) -> None:
        while not self._stop.is_set():
            try:
                job_id, fn = self._queues[lane].get(timeout=0.2)
            except queue.Empty:
                continue
            self.update(job_id, status="running")
            handle = JobHandle(self, job_id)
            try:
                result = fn(handle)
                with self._lock:
                    record = self.jobs[job_id]
                    record.result = result
                    record.status = "finished"
                    record.progress = 1.0
                    record.updated = time.time()
            except NewsrecError as exc:
                logger.warning("job %s failed: %s", job_id, exc)
                self._fail(job_id, str(exc))
            except Exception as exc:
                logger.exception("job %s crashed", job_id)
                self._fail(job_id, f"internal error: {exc}")
            finally:
                buffer = self.buffer(job_id)
                if buffer is not None:
                    buffer.close()

    def _fail(self, job_id: str, message: str) -> None:
        with self._lock:
            record = self.jobs[job_id]
            record.status = "failed"
            record.error = message
            record.updated = time.time()


class JobHandle:
    """What a running job sees: progress updates and its event buffer."""

    def __init__(self, manager: JobManager, job_id: str):
        self.manager = manager
        self.job_id = job_id

    @property
    def buffer(self) -> MemorySink:
        buffer = self.manager.buffer(self.job_id)
        assert buffer is not None
        return buffer

    def set_progress(self, fraction: float) -> None:
        self.manager.update(self.job_id, progress=fraction)
