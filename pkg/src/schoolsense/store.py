"""Durable, idempotent reading store with time-series queries.

Storage is append-only line-JSON segments (segments/NNNNNN.log) plus an
in-memory index rebuilt on open. A batch is acknowledged only after its
records are fsync'd, so an acknowledged reading always survives a crash;
a torn final line (killed mid-write) is dropped on recovery.
"""

from __future__ import annotations

import json
import math
import os
import threading
from bisect import bisect_left, insort
from dataclasses import dataclass, field
from datetime import date as date_cls
from datetime import datetime, timedelta
from pathlib import Path
from zoneinfo import ZoneInfo

from .errors import RangeError, RecoveryError, ValidationError
from .metrics import METRICS_BY_NAME, POWER_METRICS, Metric
from .topology import Reading, Registry

DEFAULT_SEGMENT_MAX_BYTES = 64 * 1024 * 1024
MAX_BATCH_READINGS = 500

AGG_FNS = ("avg", "min", "max", "sum")

REJECT_MALFORMED = "malformed"
REJECT_UNKNOWN_METRIC = "unknown_metric"
REJECT_RANGE = "range"


@dataclass
class IngestResult:
    accepted: int = 0
    duplicates: int = 0
    rejected: list[tuple[int, str]] = field(default_factory=list)

    def to_json_dict(self) -> dict:
        return {
            "accepted": self.accepted,
            "duplicates": self.duplicates,
            "rejected": [{"index": i, "reason": r} for i, r in self.rejected],
        }


@dataclass(frozen=True)
class AggPoint:
    window_start: int
    value: float
    sample_count: int


def _parse_reading(entry: dict) -> Reading:
    """Validate one raw reading dict; raises ValidationError/RangeError."""
    if not isinstance(entry, dict):
        raise ValidationError("reading must be an object")
    for key in ("node_id", "metric", "value", "ts", "seq"):
        if key not in entry:
            raise ValidationError(f"reading missing {key!r}")
    name = entry["metric"]
    metric = METRICS_BY_NAME.get(name)
    if metric is None:
        raise KeyError(name)
    node_id, ts, seq = entry["node_id"], entry["ts"], entry["seq"]
    value = entry["value"]
    if (
        not isinstance(node_id, int)
        or isinstance(node_id, bool)
        or not isinstance(ts, int)
        or not isinstance(seq, int)
        or not isinstance(value, (int, float))
        or isinstance(value, bool)
    ):
        raise ValidationError("reading field has wrong type")
    if node_id < 0 or ts < 0 or seq < 0:
        raise ValidationError("reading field out of range")
    value = float(value)
    if not metric.lo <= value <= metric.hi:
        raise RangeError(f"{name} value {value} outside [{metric.lo}, {metric.hi}]")
    return Reading(node_id=node_id, metric=metric, value=value, ts=ts, seq=seq)


class TelemetryStore:
    """Opens (and recovers) a storage directory; see module docstring."""

    def __init__(
        self,
        registry: Registry,
        root: str | Path,
        timezone: str = "UTC",
        segment_max_bytes: int = DEFAULT_SEGMENT_MAX_BYTES,
        fsync: bool = True,
    ):
        self.registry = registry
        self.root = Path(root)
        self.timezone = timezone
        self.segment_max_bytes = segment_max_bytes
        self.fsync = fsync
        self._lock = threading.RLock()
        # (node_id, metric code) -> list of (ts, seq, value), sorted
        self._index: dict[tuple[int, int], list[tuple[int, int, float]]] = {}
        self._dedup: set[tuple[int, int, int]] = set()  # (node_id, seq, code)
        self._count = 0
        self._segments_dir = self.root / "segments"
        self._segments_dir.mkdir(parents=True, exist_ok=True)
        self._writer = None
        self._writer_path: Path | None = None
        self._recover()

    # -- recovery ------------------------------------------------------------

    def _segment_paths(self) -> list[Path]:
        return sorted(self._segments_dir.glob("*.log"))

    def _recover(self) -> None:
        segments = self._segment_paths()
        for seg_no, path in enumerate(segments):
            is_last_segment = seg_no == len(segments) - 1
            data = path.read_bytes()
            offset = 0
            truncate_at: int | None = None
            while offset < len(data):
                newline = data.find(b"\n", offset)
                has_newline = newline != -1
                line_end = newline if has_newline else len(data)
                raw = data[offset:line_end]
                # A defective record at the very tail of the last segment is a
                # torn write from a crash; anywhere else it is corruption.
                torn_ok = is_last_segment and line_end >= len(data) - 1
                try:
                    reading = _parse_reading(json.loads(raw.decode("utf-8")))
                    if not has_newline:
                        raise ValueError("record missing newline terminator")
                except (ValueError, KeyError) as exc:
                    if torn_ok:
                        truncate_at = offset
                        break
                    raise RecoveryError(path.name, offset, str(exc)) from None
                self._insert(reading)
                offset = line_end + 1
            if truncate_at is not None:
                with open(path, "r+b") as fh:
                    fh.truncate(truncate_at)
        self._open_writer()

    def _open_writer(self) -> None:
        segments = self._segment_paths()
        if segments and segments[-1].stat().st_size < self.segment_max_bytes:
            path = segments[-1]
        else:
            next_no = (
                int(segments[-1].stem) + 1 if segments else 1
            )
            path = self._segments_dir / f"{next_no:06d}.log"
        self._writer = open(path, "ab")
        self._writer_path = path

    def _roll_if_needed(self) -> None:
        if self._writer.tell() >= self.segment_max_bytes:
            self._writer.close()
            next_no = int(self._writer_path.stem) + 1
            self._writer_path = self._segments_dir / f"{next_no:06d}.log"
            self._writer = open(self._writer_path, "ab")

    def close(self) -> None:
        with self._lock:
            if self._writer is not None:
                self._writer.close()
                self._writer = None

    # -- ingestion -----------------------------------------------------------

    def _insert(self, reading: Reading) -> bool:
        """Index one reading; returns False when it is a duplicate."""
        key = (reading.node_id, reading.seq, reading.metric.code)
        if key in self._dedup:
            return False
        self._dedup.add(key)
        series = self._index.setdefault((reading.node_id, reading.metric.code), [])
        item = (reading.ts, reading.seq, reading.value)
        if not series or item >= series[-1]:
            series.append(item)
        else:
            insort(series, item)
        self._count += 1
        return True

    def ingest(self, batch: dict) -> IngestResult:
        """Idempotently store one upload batch; ack only after fsync."""
        if not isinstance(batch, dict):
            raise ValidationError("batch must be a JSON object")
        readings_raw = batch.get("readings")
        if not isinstance(readings_raw, list):
            raise ValidationError("batch.readings must be a list")
        if not 1 <= len(readings_raw) <= MAX_BATCH_READINGS:
            raise ValidationError(
                f"batch size {len(readings_raw)} outside 1..{MAX_BATCH_READINGS}"
            )
        if not isinstance(batch.get("gateway_id"), str) or not isinstance(
            batch.get("batch_id"), str
        ):
            raise ValidationError("batch needs string gateway_id and batch_id")

        result = IngestResult()
        with self._lock:
            to_store: list[Reading] = []
            staged: set[tuple[int, int, int]] = set()
            for i, raw in enumerate(readings_raw):
                try:
                    reading = _parse_reading(raw)
                except KeyError:
                    result.rejected.append((i, REJECT_UNKNOWN_METRIC))
                    continue
                except RangeError:
                    result.rejected.append((i, REJECT_RANGE))
                    continue
                except ValidationError:
                    result.rejected.append((i, REJECT_MALFORMED))
                    continue
                key = (reading.node_id, reading.seq, reading.metric.code)
                if key in self._dedup or key in staged:
                    result.duplicates += 1
                    continue
                staged.add(key)
                to_store.append(reading)

            if to_store:
                lines = [
                    json.dumps(r.to_json_dict(), separators=(",", ":")) + "\n"
                    for r in to_store
                ]
                self._writer.write("".join(lines).encode("utf-8"))
                self._writer.flush()
                if self.fsync:
                    os.fsync(self._writer.fileno())
                self._roll_if_needed()
                for reading in to_store:
                    self._insert(reading)
                result.accepted = len(to_store)
        return result

    # -- queries -------------------------------------------------------------

    def _target_nodes(self, kind: str, target_id: str) -> list[int]:
        return self.registry.resolve_target(kind, target_id)

    def latest(self, kind: str, target_id: str, metric: Metric) -> Reading | None:
        """Newest reading by (ts, seq) across the target's nodes, or None."""
        with self._lock:
            best: tuple[tuple[int, int, int], int, float] | None = None
            for node_id in self._target_nodes(kind, target_id):
                series = self._index.get((node_id, metric.code))
                if not series:
                    continue
                ts, seq, value = series[-1]
                rank = (ts, seq, node_id)
                if best is None or rank > best[0]:
                    best = (rank, node_id, value)
            if best is None:
                return None
            (ts, seq, node_id), _, value = best
            return Reading(node_id=node_id, metric=metric, value=value, ts=ts, seq=seq)

    def series(
        self, kind: str, target_id: str, metric: Metric, from_ts: int, to_ts: int
    ) -> list[Reading]:
        """All readings with from_ts <= ts < to_ts, ascending (ts, seq)."""
        if from_ts > to_ts:
            raise RangeError(f"inverted time range [{from_ts}, {to_ts})")
        with self._lock:
            merged: list[tuple[int, int, int, float]] = []
            for node_id in self._target_nodes(kind, target_id):
                series = self._index.get((node_id, metric.code))
                if not series:
                    continue
                lo = bisect_left(series, (from_ts,))
                hi = bisect_left(series, (to_ts,))
                merged.extend(
                    (ts, seq, node_id, value) for ts, seq, value in series[lo:hi]
                )
        merged.sort()
        return [
            Reading(node_id=node_id, metric=metric, value=value, ts=ts, seq=seq)
            for ts, seq, node_id, value in merged
        ]

    def aggregate(
        self,
        kind: str,
        target_id: str,
        metric: Metric,
        from_ts: int,
        to_ts: int,
        window_s: int,
        fn: str,
    ) -> list[AggPoint]:
        """Tumbling epoch-aligned windows over series(); empty windows omitted."""
        if window_s < 1:
            raise RangeError(f"window must be >= 1 s, got {window_s}")
        if fn not in AGG_FNS:
            raise ValidationError(f"unknown aggregate fn {fn!r}")
        readings = self.series(kind, target_id, metric, from_ts, to_ts)
        points: list[AggPoint] = []
        window_start: int | None = None
        values: list[float] = []

        def emit():
            if not values:
                return
            if fn == "avg":
                value = math.fsum(values) / len(values)
            elif fn == "min":
                value = min(values)
            elif fn == "max":
                value = max(values)
            else:
                value = math.fsum(values)
            points.append(AggPoint(window_start, value, len(values)))

        for r in readings:
            ws = r.ts - r.ts % window_s
            if ws != window_start:
                emit()
                window_start = ws
                values = []
            values.append(r.value)
        emit()
        return points

    def daily_energy(
        self, building_id: str, day: date_cls | str
    ) -> dict[str, float] | None:
        """kWh per phase and total over the civil day; None when no data.

        Trapezoidal integration of each phase's power samples; intervals longer
        than twice the meter's report interval contribute nothing (outages are
        not bridged).
        """
        if isinstance(day, str):
            day = date_cls.fromisoformat(day)
        nodes = self.registry.power_nodes_of_building(building_id)
        if not nodes:
            return None
        tz = ZoneInfo(self.timezone)
        day_start = int(datetime(day.year, day.month, day.day, tzinfo=tz).timestamp())
        day_end = int(
            (datetime(day.year, day.month, day.day, tzinfo=tz) + timedelta(days=1)).timestamp()
        )
        gap_limit = 2 * max(n.report_interval_s for n in nodes)

        result: dict[str, float] = {}
        any_samples = False
        for metric in POWER_METRICS:
            samples = [
                (r.ts, r.value)
                for r in self.series(
                    "building",
                    building_id,
                    metric,
                    day_start - gap_limit,
                    day_end + gap_limit + 1,
                )
            ]
            if any(day_start <= ts < day_end for ts, _ in samples):
                any_samples = True
            terms: list[float] = []
            for (t0, p0), (t1, p1) in zip(samples, samples[1:]):
                dt = t1 - t0
                if dt <= 0 or dt > gap_limit:
                    continue
                a, b = max(t0, day_start), min(t1, day_end)
                if b <= a:
                    continue
                pa = p0 + (p1 - p0) * (a - t0) / dt
                pb = p0 + (p1 - p0) * (b - t0) / dt
                terms.append((pa + pb) / 2 * (b - a))
            result[metric.name] = math.fsum(terms) / 3.6e6
        if not any_samples:
            return None
        result["total"] = math.fsum(result[m.name] for m in POWER_METRICS)
        return result

    @property
    def reading_count(self) -> int:
        with self._lock:
            return self._count

    def __enter__(self) -> "TelemetryStore":
        return self

    def __exit__(self, *exc) -> None:
        self.close()


def recover(
    registry: Registry, storage_dir: str | Path, **kwargs
) -> TelemetryStore:
    """Rebuild a store from its segments; alias for opening it."""
    return TelemetryStore(registry, storage_dir, **kwargs)
