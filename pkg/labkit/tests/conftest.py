import socket
import threading
import time

import pytest
import uvicorn

from schoolsense.api import ApiConfig, create_app
from schoolsense.demo import seed_demo
from schoolsense.store import TelemetryStore
from schoolsense.topology import load_fleet_file

CONST_DAY = "2023-07-03"
CONST_DAY_START = 1_688_342_400  # 2023-07-03 00:00 UTC


def _free_port() -> int:
    with socket.socket() as s:
        s.bind(("127.0.0.1", 0))
        return s.getsockname()[1]


def _ingest_constant_day(storage):
    """One full synthetic day of 1000 W on phase A for the demo meter."""
    registry = load_fleet_file(storage / "fleet.json")
    store = TelemetryStore(registry, storage)
    batch = []
    n = 0
    for k in range(0, 1441):
        n += 1
        batch.append({
            "node_id": 201, "metric": "power_phase_a", "value": 1000.0,
            "ts": CONST_DAY_START + k * 60, "seq": 500_000 + k,
        })
        if len(batch) == 500:
            store.ingest({"gateway_id": "t", "batch_id": f"cd{n}", "readings": batch})
            batch = []
    if batch:
        store.ingest({"gateway_id": "t", "batch_id": "cdt", "readings": batch})
    store.close()


def _start_server(storage):
    app = create_app(ApiConfig(storage_dir=storage, gateway_token="labkit-token"))
    port = _free_port()
    server = uvicorn.Server(
        uvicorn.Config(app, host="127.0.0.1", port=port, log_level="error")
    )
    thread = threading.Thread(target=server.run, daemon=True)
    thread.start()
    deadline = time.time() + 10
    while not server.started and time.time() < deadline:
        time.sleep(0.02)
    assert server.started
    return f"http://127.0.0.1:{port}", server, thread, app


@pytest.fixture(scope="session")
def demo_server(tmp_path_factory):
    """A real HTTP server over a small seeded demo dataset."""
    storage = tmp_path_factory.mktemp("labkit-storage")
    seed_demo(storage, hours=0.2)
    _ingest_constant_day(storage)
    url, server, thread, app = _start_server(storage)
    yield url
    server.should_exit = True
    thread.join(timeout=5)
    app.state.store.close()
    app.state.engine.close()


@pytest.fixture(scope="session")
def empty_server(tmp_path_factory):
    """A server with topology but zero readings."""
    storage = tmp_path_factory.mktemp("labkit-empty")
    seed_demo(storage, hours=0)
    url, server, thread, app = _start_server(storage)
    yield url
    server.should_exit = True
    thread.join(timeout=5)
    app.state.store.close()
    app.state.engine.close()
