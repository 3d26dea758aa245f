"""Gateway bridging the node radio side to the ingestion API.

Decodes and validates frames, deduplicates on (node, seq), buffers decoded
readings, and emits idempotent upload batches that survive upload failures:
a failed batch is retried with exponential backoff under the same batch id,
so the ingestion side can deduplicate.

All public methods take `now` explicitly; nothing here reads the wall clock.
"""

from __future__ import annotations

import threading
from collections import Counter, deque
from dataclasses import dataclass, field

from .errors import (
    ChecksumError,
    FrameError,
    ProtocolError,
    RangeError,
    TruncatedError,
    UnknownMetricError,
)
from .frames import decode_frame
from .metrics import from_wire, metric_by_code
from .topology import Reading

DEFAULT_BUFFER_CAP = 10_000
DEFAULT_BATCH_SIZE = 500
DEFAULT_BATCH_AGE_S = 30.0
DEFAULT_SEEN_WINDOW = 4_096
DEFAULT_BACKOFF_CAP_S = 60.0
DEFAULT_MAX_AHEAD_S = 300
DEFAULT_MAX_BEHIND_S = 7 * 86_400

REASON_TRUNCATED = "truncated"
REASON_CHECKSUM = "checksum"
REASON_UNKNOWN_METRIC = "unknown_metric"
REASON_FRAME = "frame"
REASON_RANGE = "range"
REASON_CLOCK_SKEW = "clock_skew"
REASON_STALE = "stale"
REASON_DUPLICATE = "duplicate"


@dataclass(frozen=True)
class AcceptResult:
    accepted: bool
    reason: str | None = None


@dataclass
class UploadBatch:
    gateway_id: str
    batch_id: str
    readings: list[Reading]

    def to_json_dict(self) -> dict:
        return {
            "gateway_id": self.gateway_id,
            "batch_id": self.batch_id,
            "readings": [r.to_json_dict() for r in self.readings],
        }


@dataclass
class _InFlight:
    batch: UploadBatch
    failures: int = 0
    next_retry_at: float = 0.0


class _SeenWindow:
    """Sliding window of the most recent seqs per node."""

    def __init__(self, capacity: int):
        self.capacity = capacity
        self._sets: dict[int, set[int]] = {}
        self._order: dict[int, deque[int]] = {}

    def seen(self, node_id: int, seq: int) -> bool:
        return seq in self._sets.get(node_id, ())

    def add(self, node_id: int, seq: int) -> None:
        seqs = self._sets.setdefault(node_id, set())
        order = self._order.setdefault(node_id, deque())
        seqs.add(seq)
        order.append(seq)
        while len(order) > self.capacity:
            seqs.discard(order.popleft())


@dataclass
class Gateway:
    gateway_id: str
    buffer_cap: int = DEFAULT_BUFFER_CAP
    batch_size: int = DEFAULT_BATCH_SIZE
    batch_age_s: float = DEFAULT_BATCH_AGE_S
    seen_window: int = DEFAULT_SEEN_WINDOW
    backoff_cap_s: float = DEFAULT_BACKOFF_CAP_S
    max_ahead_s: int = DEFAULT_MAX_AHEAD_S
    max_behind_s: int = DEFAULT_MAX_BEHIND_S
    counters: Counter = field(default_factory=Counter)

    def __post_init__(self):
        self._buffer: deque[tuple[Reading, float]] = deque()  # (reading, enqueued_at)
        self._seen = _SeenWindow(self.seen_window)
        self._in_flight: dict[str, _InFlight] = {}
        self._batch_counter = 0
        self._lock = threading.Lock()

    # -- radio side ----------------------------------------------------------

    def accept_frame(self, data: bytes, now: float) -> AcceptResult:
        """Decode, validate and buffer one frame; never raises for bad input."""
        try:
            report = decode_frame(data)
            readings = [
                Reading(
                    node_id=report.node_id,
                    metric=(metric := metric_by_code(code)),
                    value=from_wire(metric, wire),
                    ts=report.ts,
                    seq=report.seq,
                )
                for code, wire in report.records
            ]
        except TruncatedError:
            return self._reject(REASON_TRUNCATED)
        except ChecksumError:
            return self._reject(REASON_CHECKSUM)
        except UnknownMetricError:
            return self._reject(REASON_UNKNOWN_METRIC)
        except RangeError:
            return self._reject(REASON_RANGE)
        except FrameError:
            return self._reject(REASON_FRAME)

        if report.ts > now + self.max_ahead_s:
            return self._reject(REASON_CLOCK_SKEW)
        if report.ts < now - self.max_behind_s:
            return self._reject(REASON_STALE)

        with self._lock:
            if self._seen.seen(report.node_id, report.seq):
                self.counters[REASON_DUPLICATE] += 1
                return AcceptResult(False, REASON_DUPLICATE)
            self._seen.add(report.node_id, report.seq)
            for reading in readings:
                self._buffer.append((reading, now))
            while len(self._buffer) > self.buffer_cap:
                self._buffer.popleft()
                self.counters["overflow_dropped"] += 1
            self.counters["accepted"] += 1
        return AcceptResult(True)

    def _reject(self, reason: str) -> AcceptResult:
        self.counters[reason] += 1
        return AcceptResult(False, reason)

    # -- upload side ---------------------------------------------------------

    def flush(self, now: float, force: bool = False) -> UploadBatch | None:
        """Emit a batch when full or aged (force drains at shutdown)."""
        with self._lock:
            if not self._buffer:
                return None
            oldest_age = now - self._buffer[0][1]
            if not (
                force
                or len(self._buffer) >= self.batch_size
                or oldest_age >= self.batch_age_s
            ):
                return None
            take = min(self.batch_size, len(self._buffer))
            readings = [self._buffer.popleft()[0] for _ in range(take)]
            self._batch_counter += 1
            batch = UploadBatch(
                gateway_id=self.gateway_id,
                batch_id=f"{self.gateway_id}-{self._batch_counter:06d}",
                readings=readings,
            )
            self._in_flight[batch.batch_id] = _InFlight(batch)
            return batch

    def handle_upload_result(self, batch_id: str, ok: bool, now: float) -> None:
        """Release the batch on success; schedule a same-id retry on failure."""
        with self._lock:
            entry = self._in_flight.get(batch_id)
            if entry is None:
                raise ProtocolError(f"unknown or already-acknowledged batch {batch_id}")
            if ok:
                del self._in_flight[batch_id]
                self.counters["uploaded_batches"] += 1
                return
            entry.failures += 1
            delay = min(2.0 ** entry.failures, self.backoff_cap_s)
            entry.next_retry_at = now + delay
            self.counters["upload_failures"] += 1

    def retry_delay_s(self, batch_id: str) -> float:
        """Current backoff delay for a failed in-flight batch."""
        entry = self._in_flight.get(batch_id)
        if entry is None:
            raise ProtocolError(f"unknown batch {batch_id}")
        return min(2.0 ** entry.failures, self.backoff_cap_s) if entry.failures else 0.0

    def due_retries(self, now: float) -> list[UploadBatch]:
        with self._lock:
            due = [
                e
                for e in self._in_flight.values()
                if e.failures > 0 and e.next_retry_at <= now
            ]
            due.sort(key=lambda e: e.batch.batch_id)
            return [e.batch for e in due]

    @property
    def buffered(self) -> int:
        return len(self._buffer)

    @property
    def in_flight(self) -> int:
        return len(self._in_flight)

    def next_retry_at(self, now: float) -> float | None:
        """Earliest scheduled retry time, or None when nothing is pending."""
        with self._lock:
            pending = [e.next_retry_at for e in self._in_flight.values() if e.failures]
            return min(pending) if pending else None
