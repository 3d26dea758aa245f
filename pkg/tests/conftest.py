import random

import pytest

from schoolsense.frames import KIND_CLASSROOM, KIND_POWER_METER, NodeReport
from schoolsense.metrics import CLASSROOM_CODES, METRICS_BY_CODE, POWER_CODES
from schoolsense.topology import (
    Building,
    BuildingTopology,
    Floor,
    NodeDescriptor,
    Registry,
    Room,
)


def make_topology(n_rooms: int = 2) -> BuildingTopology:
    rooms = [
        Room(f"r{i}", "f1", f"Room {i}", "NESW"[i % 4], 50.0)
        for i in range(1, n_rooms + 1)
    ]
    return BuildingTopology(
        buildings=[Building("b1", "Test School")],
        floors=[Floor("f1", "b1", 0)],
        rooms=rooms,
    )


def make_registry(n_rooms: int = 2, interval: int = 60, meter_interval: int | None = None):
    topo = make_topology(n_rooms)
    nodes = [
        NodeDescriptor(
            node_id=100 + i,
            kind="classroom",
            binding=f"r{i}",
            metrics=tuple(sorted(CLASSROOM_CODES)),
            report_interval_s=interval,
        )
        for i in range(1, n_rooms + 1)
    ]
    nodes.append(
        NodeDescriptor(
            node_id=900,
            kind="power_meter",
            binding="b1",
            metrics=tuple(sorted(POWER_CODES)),
            report_interval_s=meter_interval or interval,
        )
    )
    return Registry(topo, nodes)


@pytest.fixture
def registry():
    return make_registry()


def random_report(rng: random.Random) -> NodeReport:
    kind = rng.choice([KIND_CLASSROOM, KIND_POWER_METER])
    pool = sorted(CLASSROOM_CODES if kind == KIND_CLASSROOM else POWER_CODES)
    codes = rng.sample(pool, rng.randint(1, len(pool)))
    records = []
    for code in codes:
        metric = METRICS_BY_CODE[code]
        lo = int(metric.lo * metric.scale)
        hi = int(metric.hi * metric.scale)
        records.append((code, rng.randint(lo, hi)))
    return NodeReport(
        version=1,
        node_kind=kind,
        node_id=rng.randint(0, 0xFFFF),
        seq=rng.randint(0, 0xFFFFFFFF),
        ts=rng.randint(0, 0xFFFFFFFF),
        records=records,
    )


def reading_dict(node_id=101, metric="temperature", value=21.5, ts=1000, seq=1):
    return {"node_id": node_id, "metric": metric, "value": value, "ts": ts, "seq": seq}


def make_batch(readings, gateway_id="gw-test", batch_id="gw-test-000001"):
    return {"gateway_id": gateway_id, "batch_id": batch_id, "readings": readings}


def quiz(question="Q?", choices=("a", "b"), correct=0):
    return {"question": question, "choices": list(choices), "correct_index": correct}


def map_dict():
    return {
        "quests": [
            {"id": "start", "area": 1, "points": 10, "kind": "quiz",
             "prerequisites": [], "quiz": quiz(correct=1)},
            {"id": "mid", "area": 2, "points": 20, "kind": "quiz",
             "prerequisites": ["start"], "quiz": quiz()},
            {"id": "live", "area": 4, "points": 15, "kind": "live_data",
             "prerequisites": ["start"],
             "live_data": {"target": "b1", "metric": "temperature", "reduce": "argmax_room"}},
            {"id": "finish", "area": 5, "points": 30, "kind": "quiz",
             "prerequisites": ["mid", "live"], "quiz": quiz()},
            {"id": "bonus1", "area": 3, "points": 5, "kind": "bonus",
             "prerequisites": [], "quiz": quiz()},
            {"id": "kit1", "area": 5, "points": 5, "kind": "labkit",
             "prerequisites": [], "quiz": quiz()},
        ],
        "sequences": [],
        "bonus_area": ["bonus1"],
        "labkit_area": ["kit1"],
    }


def roster_dict():
    return {
        "schools": [{"id": "s1", "name": "S1"}, {"id": "s2", "name": "S2"}],
        "classes": [
            {"id": "c1", "school_id": "s1", "name": "5A"},
            {"id": "c2", "school_id": "s1", "name": "5B"},
            {"id": "c3", "school_id": "s2", "name": "6A"},
        ],
        "students": [
            {"id": "sa", "class_id": "c1", "name": "A"},
            {"id": "sb", "class_id": "c1", "name": "B"},
            {"id": "sc", "class_id": "c2", "name": "C"},
            {"id": "sd", "class_id": "c3", "name": "D"},
        ],
        "teachers": [
            {"id": "t1", "name": "T1", "class_ids": ["c1"]},
            {"id": "t2", "name": "T2", "class_ids": ["c2", "c3"]},
        ],
    }


def seed_api_storage(storage, n_rooms=2, meter_interval=60):
    """Write fleet/roster/questmap files an api-service instance can load."""
    import json as _json
    from pathlib import Path

    from schoolsense.topology import dump_fleet_file

    storage = Path(storage)
    storage.mkdir(parents=True, exist_ok=True)
    registry = make_registry(n_rooms, meter_interval=meter_interval)
    dump_fleet_file(registry, storage / "fleet.json")
    (storage / "roster.json").write_text(_json.dumps(roster_dict()))
    (storage / "questmap.json").write_text(_json.dumps(map_dict()))
    return registry
