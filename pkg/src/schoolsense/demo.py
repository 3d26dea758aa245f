"""Demo dataset and the seed pipeline.

seed_demo() writes the demo fleet/roster/quest map into a storage directory,
runs the simulator for a window of virtual time, and pushes every frame
through an in-process gateway into the store, exactly as the networked path
would.
"""

from __future__ import annotations

import json
import shutil
import time
from importlib import resources
from pathlib import Path

from .api import FLEET_FILE, QUESTMAP_FILE, ROSTER_FILE
from .gateway import Gateway
from .sim import FleetSimulator, SimConfig, sim_config_from_dict
from .store import TelemetryStore
from .topology import dump_fleet_file

DEMO_GATEWAY_ID = "gw-demo"


def _data_path(name: str):
    return resources.files("schoolsense.data").joinpath(name)


def demo_sim_dict() -> dict:
    with _data_path("demo_sim.json").open(encoding="utf-8") as fh:
        return json.load(fh)


def demo_sim_config(start_ts: int) -> SimConfig:
    return sim_config_from_dict(demo_sim_dict(), start_ts=start_ts)


def pump_frames(
    frames: list[bytes],
    gateway: Gateway,
    ingest,
    now: float | None = None,
) -> dict:
    """Feed frames through a gateway into an ingest callable; returns counters.

    `ingest` receives a batch JSON dict and must return an IngestResult-shaped
    dict or object; upload failures are not simulated here.
    """
    now = time.time() if now is None else now
    stored = 0
    duplicates = 0

    def upload(batch) -> None:
        nonlocal stored, duplicates
        result = ingest(batch.to_json_dict())
        accepted = result["accepted"] if isinstance(result, dict) else result.accepted
        dups = result["duplicates"] if isinstance(result, dict) else result.duplicates
        stored += accepted
        duplicates += dups
        gateway.handle_upload_result(batch.batch_id, True, now)

    for frame in frames:
        gateway.accept_frame(frame, now)
        while gateway.buffered >= gateway.batch_size:
            batch = gateway.flush(now)
            if batch is None:
                break
            upload(batch)
    while gateway.buffered:
        batch = gateway.flush(now, force=True)
        if batch is None:
            break
        upload(batch)
    return {
        "stored": stored,
        "duplicates": duplicates,
        "counters": dict(gateway.counters),
    }


def seed_demo(
    storage_dir: str | Path,
    hours: float = 24.0,
    start_ts: int | None = None,
    quiet: bool = True,
) -> dict:
    """Populate a storage directory with demo config and simulated history."""
    storage = Path(storage_dir)
    storage.mkdir(parents=True, exist_ok=True)
    duration = int(hours * 3600)
    if start_ts is None:
        start_ts = (int(time.time()) // 60) * 60 - duration

    config = demo_sim_config(start_ts)
    dump_fleet_file(config.registry, storage / FLEET_FILE)
    for name, target in (
        ("demo_roster.json", ROSTER_FILE),
        ("demo_questmap.json", QUESTMAP_FILE),
    ):
        with resources.as_file(_data_path(name)) as src:
            shutil.copyfile(src, storage / target)

    sim = FleetSimulator(config)
    frames = sim.advance(start_ts + duration)

    store = TelemetryStore(config.registry, storage)
    gateway = Gateway(DEMO_GATEWAY_ID)
    try:
        stats = pump_frames(frames, gateway, store.ingest)
    finally:
        store.close()
    stats.update(frames=len(frames), start_ts=start_ts, end_ts=start_ts + duration)
    if not quiet:
        print(
            f"seeded {stats['stored']} readings from {stats['frames']} frames "
            f"({start_ts}..{start_ts + duration})"
        )
    return stats
