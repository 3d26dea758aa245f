"""Deterministic sensor-fleet simulator.

Generates the traffic of a school building on a virtual clock: classroom
nodes (temperature, humidity, noise, motion) and a 3-phase building power
meter, encoded as wire frames. All randomness comes from a counter-based
Philox generator keyed by (seed, node, stream, timestamp), so any sample can
be drawn independently of ordering and two runs with the same config are
byte-identical.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from datetime import datetime
from decimal import Decimal
from pathlib import Path
from zoneinfo import ZoneInfo

import numpy as np

from .errors import ConfigError
from .frames import KIND_CLASSROOM, KIND_POWER_METER, NodeReport, encode_frame
from .metrics import (
    HUMIDITY,
    MOTION,
    NOISE,
    POWER_PHASE_A,
    POWER_PHASE_B,
    POWER_PHASE_C,
    TEMPERATURE,
    Metric,
    metric_by_code,
    to_wire,
)
from .topology import (
    KIND_NAME_CLASSROOM,
    NodeDescriptor,
    Registry,
    node_from_dict,
    topology_from_dict,
)

FAULT_DROP = "drop"
FAULT_CORRUPT = "corrupt_byte"
FAULT_DUPLICATE = "duplicate"
FAULT_KINDS = (FAULT_DROP, FAULT_CORRUPT, FAULT_DUPLICATE)

# Philox counter lanes; metric samples use the metric's own wire code.
_LANE_FAULT = {FAULT_DROP: 0xF0, FAULT_CORRUPT: 0xF1, FAULT_DUPLICATE: 0xF2}

_KEY_CONST = 0x5343484F4F4C5345  # fixed second key word

# Generative model constants: indoor temperature relaxes toward a heated
# setpoint mixed with a diurnal outdoor curve; occupancy adds heat, moisture,
# noise, motion and plug load.
_SETPOINT_C = 21.0
_OUTDOOR_MEAN_C = 12.0
_OUTDOOR_SWING_C = 6.0
_OUTDOOR_PEAK_SHIFT_H = 9.0
_INDOOR_MIX = 0.7
_OCC_TEMP_BOOST_C = 1.5
_TEMP_NOISE_SD = 0.2
_RH_BASE = 45.0
_OCC_RH_BOOST = 10.0
_RH_NOISE_SD = 1.0
_NOISE_OCCUPIED = (300.0, 700.0)
_NOISE_EMPTY = (50.0, 150.0)
_MOTION_LAMBDA = 5.0
_POWER_BASE_W = 800
_POWER_PER_ROOM_W = 350
# Shares kept as exact decimals so phase values like 402.5 W round on the
# wire the way the arithmetic says, not the way binary floats drift.
PHASE_SHARES = {
    POWER_PHASE_A.code: Decimal("0.40"),
    POWER_PHASE_B.code: Decimal("0.35"),
    POWER_PHASE_C.code: Decimal("0.25"),
}


@dataclass(frozen=True)
class Occupancy:
    start_hour: int = 8
    end_hour: int = 16


@dataclass(frozen=True)
class FaultSpec:
    node_id: int
    kind: str
    seqs: frozenset[int] | None = None
    rate: float | None = None

    def validate(self) -> None:
        if self.kind not in FAULT_KINDS:
            raise ConfigError(f"unknown fault kind {self.kind!r}")
        if (self.seqs is None) == (self.rate is None):
            raise ConfigError("fault spec needs exactly one of seqs or rate")
        if self.rate is not None and not 0.0 <= self.rate <= 1.0:
            raise ConfigError(f"fault rate {self.rate} outside [0, 1]")


@dataclass
class SimConfig:
    seed: int
    registry: Registry
    start_ts: int
    occupancy: Occupancy = field(default_factory=Occupancy)
    faults: list[FaultSpec] = field(default_factory=list)
    timezone: str = "UTC"


def load_sim_config(path: str | Path, start_ts: int | None = None) -> SimConfig:
    """Read a SimConfig JSON file (schema in docs/simconfig.schema.json).

    A null start_ts in the file must be supplied by the caller.
    """
    with open(path, encoding="utf-8") as fh:
        d = json.load(fh)
    return sim_config_from_dict(d, start_ts=start_ts)


def sim_config_from_dict(d: dict, start_ts: int | None = None) -> SimConfig:
    topo = topology_from_dict(d["topology"])
    nodes = [node_from_dict(n) for n in d["nodes"]]
    registry = Registry(topo, nodes)
    occ_d = d.get("occupancy", {})
    occupancy = Occupancy(
        start_hour=int(occ_d.get("start_hour", 8)),
        end_hour=int(occ_d.get("end_hour", 16)),
    )
    faults = []
    for f in d.get("faults", []):
        spec = FaultSpec(
            node_id=int(f["node_id"]),
            kind=f["kind"],
            seqs=frozenset(int(s) for s in f["seqs"]) if "seqs" in f else None,
            rate=float(f["rate"]) if "rate" in f else None,
        )
        faults.append(spec)
    effective_start = d.get("start_ts")
    if effective_start is None:
        effective_start = start_ts
    if effective_start is None:
        raise ConfigError("config has no start_ts and none was supplied")
    return SimConfig(
        seed=int(d["seed"]),
        registry=registry,
        start_ts=int(effective_start),
        occupancy=occupancy,
        faults=faults,
        timezone=d.get("timezone", "UTC"),
    )


class FleetSimulator:
    """Virtual fleet state: clock plus per-node sequence counters."""

    def __init__(self, config: SimConfig):
        if config.start_ts < 0:
            raise ConfigError("start_ts must be a unix timestamp")
        if not 0 <= config.occupancy.start_hour < config.occupancy.end_hour <= 24:
            raise ConfigError("occupancy hours must satisfy 0 <= start < end <= 24")
        for fault in config.faults:
            fault.validate()
            if fault.node_id not in config.registry.nodes:
                raise ConfigError(f"fault references unknown node {fault.node_id}")
        self.config = config
        self.registry = config.registry
        self.clock = config.start_ts
        self.seq = {node_id: 0 for node_id in config.registry.nodes}
        self._tz = ZoneInfo(config.timezone)
        self._faults_by_node: dict[int, list[FaultSpec]] = {}
        for fault in config.faults:
            self._faults_by_node.setdefault(fault.node_id, []).append(fault)

    # -- randomness ---------------------------------------------------------

    def _rng(self, node_id: int, lane: int, ts: int) -> np.random.Generator:
        key = np.array(
            [self.config.seed & 0xFFFFFFFFFFFFFFFF, _KEY_CONST], dtype=np.uint64
        )
        counter = np.array([ts, node_id, lane, 0], dtype=np.uint64)
        return np.random.Generator(np.random.Philox(counter=counter, key=key))

    # -- occupancy ----------------------------------------------------------

    def is_occupied(self, ts: int) -> bool:
        dt = datetime.fromtimestamp(ts, tz=self._tz)
        if dt.weekday() >= 5:
            return False
        return self.config.occupancy.start_hour <= dt.hour < self.config.occupancy.end_hour

    def occupied_room_count(self, building_id: str, ts: int) -> int:
        if not self.is_occupied(ts):
            return 0
        return len(self.registry.topology.rooms_of_building(building_id))

    def outdoor_temperature(self, ts: int) -> float:
        dt = datetime.fromtimestamp(ts, tz=self._tz)
        h = dt.hour + dt.minute / 60 + dt.second / 3600
        return _OUTDOOR_MEAN_C + _OUTDOOR_SWING_C * math.sin(
            2 * math.pi * (h - _OUTDOOR_PEAK_SHIFT_H) / 24
        )

    # -- generative model ---------------------------------------------------

    def deterministic_value(self, node_id: int, metric: Metric, ts: int) -> float:
        """The noise-free component of a sample (the model mean)."""
        node = self.registry.node(node_id)
        if metric.code not in node.metrics:
            raise ConfigError(f"node {node_id} does not report {metric.name}")
        if metric.code in PHASE_SHARES:
            total = _POWER_BASE_W + _POWER_PER_ROOM_W * self.occupied_room_count(
                node.binding, ts
            )
            return float(PHASE_SHARES[metric.code] * total)
        occ = 1.0 if self.is_occupied(ts) else 0.0
        if metric is TEMPERATURE:
            return (
                _INDOOR_MIX * _SETPOINT_C
                + (1 - _INDOOR_MIX) * self.outdoor_temperature(ts)
                + _OCC_TEMP_BOOST_C * occ
            )
        if metric is HUMIDITY:
            return _RH_BASE + _OCC_RH_BOOST * occ
        if metric is NOISE:
            lo, hi = _NOISE_OCCUPIED if occ else _NOISE_EMPTY
            return (lo + hi) / 2
        if metric is MOTION:
            return _MOTION_LAMBDA * occ
        raise ConfigError(f"no model for metric {metric.name}")

    def sample_metric(self, node_id: int, metric: Metric, ts: int) -> float:
        """One engineering-unit sample; pure in (seed, node, metric, ts)."""
        node = self.registry.node(node_id)
        if metric.code not in node.metrics:
            raise ConfigError(f"node {node_id} does not report {metric.name}")
        if metric.code in PHASE_SHARES:
            value = self.deterministic_value(node_id, metric, ts)
            return min(max(value, metric.lo), metric.hi)
        occ = self.is_occupied(ts)
        rng = self._rng(node_id, metric.code, ts)
        if metric is TEMPERATURE:
            value = self.deterministic_value(node_id, metric, ts) + rng.normal(
                0.0, _TEMP_NOISE_SD
            )
        elif metric is HUMIDITY:
            value = self.deterministic_value(node_id, metric, ts) + rng.normal(
                0.0, _RH_NOISE_SD
            )
        elif metric is NOISE:
            lo, hi = _NOISE_OCCUPIED if occ else _NOISE_EMPTY
            value = rng.uniform(lo, hi)
        elif metric is MOTION:
            value = float(rng.poisson(_MOTION_LAMBDA)) if occ else 0.0
        else:
            raise ConfigError(f"no model for metric {metric.name}")
        return min(max(value, metric.lo), metric.hi)

    # -- frame emission -----------------------------------------------------

    def _build_report(self, node: NodeDescriptor, seq: int, ts: int) -> NodeReport:
        records = []
        for code in sorted(node.metrics):
            metric = metric_by_code(code)
            value = self.sample_metric(node.node_id, metric, ts)
            records.append((code, to_wire(metric, value)))
        kind = KIND_CLASSROOM if node.kind == KIND_NAME_CLASSROOM else KIND_POWER_METER
        return NodeReport(
            version=1, node_kind=kind, node_id=node.node_id, seq=seq, ts=ts,
            records=records,
        )

    def _fault_applies(self, fault: FaultSpec, node_id: int, seq: int, ts: int) -> bool:
        if fault.seqs is not None:
            return seq in fault.seqs
        rng = self._rng(node_id, _LANE_FAULT[fault.kind], ts)
        return bool(rng.uniform() < fault.rate)

    def _corrupt(self, frame: bytes, node_id: int, ts: int) -> bytes:
        rng = self._rng(node_id, _LANE_FAULT[FAULT_CORRUPT], ts)
        rng.uniform()  # burn the applies-decision draw to decouple index/mask
        index = int(rng.integers(0, len(frame)))
        mask = int(rng.integers(1, 256))
        corrupted = bytearray(frame)
        corrupted[index] ^= mask
        return bytes(corrupted)

    def advance(self, until_ts: int) -> list[bytes]:
        """Emit every due frame with ts in (clock, until_ts], ordered by (ts, node)."""
        if until_ts < self.clock:
            raise ConfigError("cannot advance the clock backwards")
        start = self.config.start_ts
        due: list[tuple[int, int, int]] = []  # (ts, node_id, seq)
        for node_id, node in self.registry.nodes.items():
            interval = node.report_interval_s
            k_lo = (self.clock - start) // interval + 1
            k_hi = (until_ts - start) // interval
            for k in range(k_lo, k_hi + 1):
                due.append((start + k * interval, node_id, k))
            if k_hi >= k_lo:
                self.seq[node_id] = k_hi
        due.sort()

        frames: list[bytes] = []
        for ts, node_id, seq in due:
            node = self.registry.nodes[node_id]
            faults = self._faults_by_node.get(node_id, [])
            if any(
                f.kind == FAULT_DROP and self._fault_applies(f, node_id, seq, ts)
                for f in faults
            ):
                continue
            frame = encode_frame(self._build_report(node, seq, ts))
            if any(
                f.kind == FAULT_CORRUPT and self._fault_applies(f, node_id, seq, ts)
                for f in faults
            ):
                frame = self._corrupt(frame, node_id, ts)
            frames.append(frame)
            if any(
                f.kind == FAULT_DUPLICATE and self._fault_applies(f, node_id, seq, ts)
                for f in faults
            ):
                frames.append(frame)
        self.clock = until_ts
        return frames


def build_fleet(config: SimConfig) -> FleetSimulator:
    """Construct simulator state at start_ts with all sequence counters at 0."""
    return FleetSimulator(config)
