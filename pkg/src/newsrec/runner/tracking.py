"""Experiment tracking: events and pluggable sinks.

The runner emits :class:`TrackingEvent` records through a sink chosen by the
configuration. The file sink writes one JSON object per line, so a run can be
replayed in order from its tracking file; the memory sink backs live event
streaming in the HTTP server.
"""

from __future__ import annotations

import json
import logging
import os
import threading
from dataclasses import dataclass
from pathlib import Path
from typing import Union

logger = logging.getLogger(__name__)

EVENT_KINDS = ("scalar", "status", "artifact")


@dataclass(frozen=True)
class TrackingEvent:
    run_id: str
    wall_time: float
    step: int
    kind: str  # scalar | status | artifact
    name: str
    value: Union[float, str]

    def to_json_line(self) -> str:
        return json.dumps(
            {
                "run_id": self.run_id,
                "wall_time": self.wall_time,
                "step": self.step,
                "kind": self.kind,
                "name": self.name,
                "value": self.value,
            },
            sort_keys=True,
        )

    @staticmethod
    def from_json_line(line: str) -> "TrackingEvent":
        data = json.loads(line)
        return TrackingEvent(
            run_id=data["run_id"],
            wall_time=data["wall_time"],
            step=data["step"],
            kind=data["kind"],
            name=data["name"],
            value=data["value"],
        )


class TrackingSink:
    """Destination for tracking events; failures must never abort a run."""

    def emit(self, event: TrackingEvent) -> None:
        raise NotImplementedError

    def flush(self) -> None:
        pass

    def close(self) -> None:
        pass


class NullSink(TrackingSink):
    def emit(self, event: TrackingEvent) -> None:
        pass


class FileSink(TrackingSink):
    """Appends one JSON line per event; replayable in order."""

    def __init__(self, path: str | os.PathLike):
        self.path = Path(path)
        self.path.parent.mkdir(parents=True, exist_ok=True)
        self._file = open(self.path, "a", encoding="utf-8")

    def emit(self, event: TrackingEvent) -> None:
        self._file.write(event.to_json_line() + "\n")

    def flush(self) -> None:
        self._file.flush()

    def close(self) -> None:
        if not self._file.closed:
            self._file.flush()
            self._file.close()


class MemorySink(TrackingSink):
    """Keeps events in memory; supports blocking reads for live streaming."""

    def __init__(self):
        self.events: list[TrackingEvent] = []
        self._condition = threading.Condition()
        self.closed = False

    def emit(self, event: TrackingEvent) -> None:
        with self._condition:
            self.events.append(event)
            self._condition.notify_all()

    def close(self) -> None:
        with self._condition:
            self.closed = True
            self._condition.notify_all()

    def read_from(self, cursor: int, timeout: float = 0.5) -> tuple[list[TrackingEvent], bool]:
        """Events after ``cursor`` plus whether the sink is closed for good."""
        with self._condition:
            if len(self.events) <= cursor and not self.closed:
                self._condition.wait(timeout)
            return list(self.events[cursor:]), self.closed and len(self.events) <= cursor


class TeeSink(TrackingSink):
    def __init__(self, *sinks: TrackingSink):
        self.sinks = [s for s in sinks if s is not None]

    def emit(self, event: TrackingEvent) -> None:
        for sink in self.sinks:
            sink.emit(event)

    def flush(self) -> None:
        for sink in self.sinks:
            sink.flush()

    def close(self) -> None:
        for sink in self.sinks:
            sink.close()


class SafeSink(TrackingSink):
    """Log-and-continue wrapper: a broken sink never fails the run."""

    def __init__(self, inner: TrackingSink):
        self.inner = inner

    def emit(self, event: TrackingEvent) -> None:
        try:
            self.inner.emit(event)
        except Exception as exc:
            logger.warning("tracking sink failed on emit (%s); continuing", exc)

    def flush(self) -> None:
        try:
            self.inner.flush()
        except Exception as exc:
            logger.warning("tracking sink failed on flush (%s); continuing", exc)

    def close(self) -> None:
        try:
            self.inner.close()
        except Exception as exc:
            logger.warning("tracking sink failed on close (%s); continuing", exc)


def make_sink(name: str, options: dict, default_path: Path) -> TrackingSink:
    """Instantiate a sink by name; ``file`` honors ``options['path']``."""
    if name == "null":
        return NullSink()
    if name == "memory":
        return MemorySink()
    if name == "file":
        return FileSink(options.get("path", default_path))
    raise ValueError(f"unknown tracking sink {name!r}")


def read_tracking_file(path: str | os.PathLike) -> list[TrackingEvent]:
    events = []
    with open(path, encoding="utf-8") as f:
        for line in f:
            line = line.strip()
            if line:
                events.append(TrackingEvent.from_json_line(line))
    return events
