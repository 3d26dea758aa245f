"""Buildings, rooms, sensor node bindings, and decoded readings.

The Registry couples a BuildingTopology with the node fleet and answers
"which nodes feed this room/building" for queries and validation.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .errors import ConfigError, NotFoundError
from .metrics import (
    CLASSROOM_CODES,
    POWER_CODES,
    Metric,
    metric_by_code,
    metric_by_name,
)

ORIENTATIONS = ("N", "E", "S", "W")

KIND_NAME_CLASSROOM = "classroom"
KIND_NAME_POWER_METER = "power_meter"


@dataclass(frozen=True)
class Building:
    id: str
    name: str


@dataclass(frozen=True)
class Floor:
    id: str
    building_id: str
    level: int


@dataclass(frozen=True)
class Room:
    id: str
    floor_id: str
    name: str
    orientation: str
    area_m2: float


@dataclass
class BuildingTopology:
    buildings: list[Building] = field(default_factory=list)
    floors: list[Floor] = field(default_factory=list)
    rooms: list[Room] = field(default_factory=list)

    def validate(self) -> None:
        for kind, items in (
            ("building", self.buildings),
            ("floor", self.floors),
            ("room", self.rooms),
        ):
            ids = [x.id for x in items]
            if len(set(ids)) != len(ids):
                raise ConfigError(f"duplicate {kind} ids")
        building_ids = {b.id for b in self.buildings}
        floor_ids = {f.id for f in self.floors}
        for f in self.floors:
            if f.building_id not in building_ids:
                raise ConfigError(f"floor {f.id} references unknown building {f.building_id}")
        for r in self.rooms:
            if r.floor_id not in floor_ids:
                raise ConfigError(f"room {r.id} references unknown floor {r.floor_id}")
            if r.orientation not in ORIENTATIONS:
                raise ConfigError(f"room {r.id} has orientation {r.orientation!r}")
            if r.area_m2 <= 0:
                raise ConfigError(f"room {r.id} has non-positive area")

    def building_of_room(self, room_id: str) -> str:
        room = next((r for r in self.rooms if r.id == room_id), None)
        if room is None:
            raise NotFoundError(f"room {room_id}")
        floor = next(f for f in self.floors if f.id == room.floor_id)
        return floor.building_id

    def rooms_of_building(self, building_id: str) -> list[Room]:
        if building_id not in {b.id for b in self.buildings}:
            raise NotFoundError(f"building {building_id}")
        floor_ids = {f.id for f in self.floors if f.building_id == building_id}
        return [r for r in self.rooms if r.floor_id in floor_ids]


@dataclass(frozen=True)
class NodeDescriptor:
    node_id: int
    kind: str                    # classroom | power_meter
    binding: str                 # room id (classroom) or building id (power meter)
    metrics: tuple[int, ...]     # wire codes
    report_interval_s: int = 60

    def validate(self) -> None:
        if not 0 <= self.node_id <= 0xFFFF:
            raise ConfigError(f"node id {self.node_id} does not fit 16 bits")
        if self.kind not in (KIND_NAME_CLASSROOM, KIND_NAME_POWER_METER):
            raise ConfigError(f"node {self.node_id}: unknown kind {self.kind!r}")
        if self.report_interval_s < 1:
            raise ConfigError(f"node {self.node_id}: report interval must be >= 1 s")
        if not self.metrics:
            raise ConfigError(f"node {self.node_id}: no metrics")
        allowed = CLASSROOM_CODES if self.kind == KIND_NAME_CLASSROOM else POWER_CODES
        for code in self.metrics:
            metric_by_code(code)
            if code not in allowed:
                raise ConfigError(
                    f"node {self.node_id}: metric 0x{code:02X} not allowed on {self.kind}"
                )


@dataclass(frozen=True)
class Reading:
    """One decoded engineering-unit sample."""

    node_id: int
    metric: Metric
    value: float
    ts: int
    seq: int

    def to_json_dict(self) -> dict:
        return {
            "node_id": self.node_id,
            "metric": self.metric.name,
            "value": self.value,
            "ts": self.ts,
            "seq": self.seq,
        }

    @classmethod
    def from_json_dict(cls, d: dict) -> "Reading":
        return cls(
            node_id=int(d["node_id"]),
            metric=metric_by_name(d["metric"]),
            value=float(d["value"]),
            ts=int(d["ts"]),
            seq=int(d["seq"]),
        )


class Registry:
    """Topology plus fleet; resolves query targets to node sets."""

    def __init__(self, topology: BuildingTopology, nodes: list[NodeDescriptor]):
        topology.validate()
        node_ids = [n.node_id for n in nodes]
        if len(set(node_ids)) != len(node_ids):
            raise ConfigError("duplicate node ids in fleet")
        room_ids = {r.id for r in topology.rooms}
        building_ids = {b.id for b in topology.buildings}
        for n in nodes:
            n.validate()
            if n.kind == KIND_NAME_CLASSROOM and n.binding not in room_ids:
                raise ConfigError(f"node {n.node_id} bound to unknown room {n.binding}")
            if n.kind == KIND_NAME_POWER_METER and n.binding not in building_ids:
                raise ConfigError(
                    f"node {n.node_id} bound to unknown building {n.binding}"
                )
        self.topology = topology
        self.nodes = {n.node_id: n for n in nodes}

    def node(self, node_id: int) -> NodeDescriptor:
        try:
            return self.nodes[node_id]
        except KeyError:
            raise NotFoundError(f"node {node_id}") from None

    def nodes_of_room(self, room_id: str) -> list[NodeDescriptor]:
        if room_id not in {r.id for r in self.topology.rooms}:
            raise NotFoundError(f"room {room_id}")
        return [
            n
            for n in self.nodes.values()
            if n.kind == KIND_NAME_CLASSROOM and n.binding == room_id
        ]

    def power_nodes_of_building(self, building_id: str) -> list[NodeDescriptor]:
        if building_id not in {b.id for b in self.topology.buildings}:
            raise NotFoundError(f"building {building_id}")
        return [
            n
            for n in self.nodes.values()
            if n.kind == KIND_NAME_POWER_METER and n.binding == building_id
        ]

    def resolve_target(self, kind: str, target_id: str) -> list[int]:
        """Resolve a (node|room|building) target to the node ids feeding it."""
        if kind == "node":
            return [self.node(int(target_id)).node_id]
        if kind == "room":
            return [n.node_id for n in self.nodes_of_room(target_id)]
        if kind == "building":
            return [n.node_id for n in self.power_nodes_of_building(target_id)]
        raise ConfigError(f"unknown target kind {kind!r}")


def topology_from_dict(d: dict) -> BuildingTopology:
    topo = BuildingTopology(
        buildings=[Building(b["id"], b["name"]) for b in d.get("buildings", [])],
        floors=[
            Floor(f["id"], f["building_id"], int(f["level"]))
            for f in d.get("floors", [])
        ],
        rooms=[
            Room(
                r["id"],
                r["floor_id"],
                r["name"],
                r["orientation"],
                float(r["area_m2"]),
            )
            for r in d.get("rooms", [])
        ],
    )
    topo.validate()
    return topo


def topology_to_dict(topo: BuildingTopology) -> dict:
    return {
        "buildings": [{"id": b.id, "name": b.name} for b in topo.buildings],
        "floors": [
            {"id": f.id, "building_id": f.building_id, "level": f.level}
            for f in topo.floors
        ],
        "rooms": [
            {
                "id": r.id,
                "floor_id": r.floor_id,
                "name": r.name,
                "orientation": r.orientation,
                "area_m2": r.area_m2,
            }
            for r in topo.rooms
        ],
    }


def node_from_dict(d: dict) -> NodeDescriptor:
    metrics = tuple(
        metric_by_name(m).code if isinstance(m, str) else int(m)
        for m in d["metrics"]
    )
    node = NodeDescriptor(
        node_id=int(d["node_id"]),
        kind=d["kind"],
        binding=d["binding"],
        metrics=metrics,
        report_interval_s=int(d.get("report_interval_s", 60)),
    )
    node.validate()
    return node


def node_to_dict(n: NodeDescriptor) -> dict:
    return {
        "node_id": n.node_id,
        "kind": n.kind,
        "binding": n.binding,
        "metrics": [metric_by_code(c).name for c in n.metrics],
        "report_interval_s": n.report_interval_s,
    }


def load_fleet_file(path: str | Path) -> Registry:
    """Load a fleet file: {"topology": {...}, "nodes": [...]}."""
    with open(path, encoding="utf-8") as fh:
        d = json.load(fh)
    topo = topology_from_dict(d["topology"])
    nodes = [node_from_dict(n) for n in d.get("nodes", [])]
    return Registry(topo, nodes)


def dump_fleet_file(registry: Registry, path: str | Path) -> None:
    d = {
        "topology": topology_to_dict(registry.topology),
        "nodes": [node_to_dict(n) for n in registry.nodes.values()],
    }
    Path(path).write_text(json.dumps(d, indent=2) + "\n", encoding="utf-8")
