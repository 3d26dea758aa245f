import pytest
from fastapi.testclient import TestClient

from schoolsense.api import ApiConfig, create_app
from schoolsense.display import assess_comfort, led_color_for_temperature, ring_level

from .conftest import make_batch, reading_dict, seed_api_storage

TOKEN = "test-token"


@pytest.fixture
def client(tmp_path):
    seed_api_storage(tmp_path)
    config = ApiConfig(storage_dir=tmp_path, gateway_token=TOKEN)
    app = create_app(config)
    with TestClient(app) as c:
        c.app_config = config
        yield c
    app.state.store.close()
    app.state.engine.close()


def ingest(client, readings, batch_id="b1", token=TOKEN):
    return client.post(
        "/api/v1/ingest",
        json=make_batch(readings, batch_id=batch_id),
        headers={"X-Gateway-Token": token},
    )


def seed_room(client, room_seq=1, temp=22.0, hum=50.0, ts=1000, node_id=101, batch_id=None):
    readings = [
        reading_dict(node_id=node_id, metric="temperature", value=temp, ts=ts, seq=room_seq),
        reading_dict(node_id=node_id, metric="humidity", value=hum, ts=ts, seq=room_seq),
    ]
    resp = ingest(client, readings, batch_id=batch_id or f"seed-{node_id}-{room_seq}")
    assert resp.status_code == 200, resp.text
    return resp


# -- ingestion ----------------------------------------------------------------


def test_ingest_requires_token(client):
    resp = ingest(client, [reading_dict()], token="wrong")
    assert resp.status_code == 401
    assert resp.json()["error"]["code"] == "unauthorized"


def test_ingest_result_shape(client):
    resp = ingest(client, [reading_dict(seq=1), reading_dict(seq=2, ts=2000)])
    assert resp.status_code == 200
    assert resp.json() == {"accepted": 2, "duplicates": 0, "rejected": []}
    replay = ingest(client, [reading_dict(seq=1), reading_dict(seq=2, ts=2000)])
    assert replay.json()["duplicates"] == 2


def test_ingest_malformed_body(client):
    resp = client.post(
        "/api/v1/ingest", json={"readings": "nope"}, headers={"X-Gateway-Token": TOKEN}
    )
    assert resp.status_code == 400
    assert resp.json()["error"]["code"] == "validation"


# -- room endpoints -------------------------------------------------------------


def test_room_latest_roundtrip(client):
    seed_room(client, temp=23.5)
    resp = client.get("/api/v1/rooms/r1/latest", params={"metric": "temperature"})
    assert resp.status_code == 200
    body = resp.json()
    assert body["value"] == 23.5
    assert body["room_id"] == "r1"
    assert body["node_id"] == 101


def test_room_latest_no_data_and_unknown(client):
    resp = client.get("/api/v1/rooms/r1/latest", params={"metric": "temperature"})
    assert resp.status_code == 404
    assert resp.json()["error"]["code"] == "no_data"
    resp = client.get("/api/v1/rooms/nowhere/latest", params={"metric": "temperature"})
    assert resp.status_code == 404
    assert resp.json()["error"]["code"] == "not_found"
    resp = client.get("/api/v1/rooms/r1/latest", params={"metric": "loudness"})
    assert resp.status_code == 400


def test_room_series_and_params(client):
    for i, ts in enumerate([100, 200, 300], 1):
        seed_room(client, room_seq=i, ts=ts)
    resp = client.get(
        "/api/v1/rooms/r1/series",
        params={"metric": "temperature", "from": 100, "to": 300},
    )
    assert resp.status_code == 200
    assert [r["ts"] for r in resp.json()["readings"]] == [100, 200]
    bad = client.get(
        "/api/v1/rooms/r1/series",
        params={"metric": "temperature", "from": 300, "to": 100},
    )
    assert bad.status_code == 400
    notint = client.get(
        "/api/v1/rooms/r1/series",
        params={"metric": "temperature", "from": "x", "to": 100},
    )
    assert notint.status_code == 400


def test_room_aggregate(client):
    for i, (ts, v) in enumerate([(0, 20.0), (30, 22.0), (60, 24.0)], 1):
        seed_room(client, room_seq=i, ts=ts, temp=v)
    resp = client.get(
        "/api/v1/rooms/r1/aggregate",
        params={"metric": "temperature", "from": 0, "to": 100, "window": 60, "fn": "avg"},
    )
    assert resp.status_code == 200
    points = resp.json()["points"]
    assert [(p["window_start"], p["sample_count"]) for p in points] == [(0, 2), (60, 1)]
    assert points[0]["value"] == pytest.approx(21.0)
    bad = client.get(
        "/api/v1/rooms/r1/aggregate",
        params={"metric": "temperature", "from": 0, "to": 100, "window": 60, "fn": "med"},
    )
    assert bad.status_code == 400


def test_room_comfort(client):
    seed_room(client, temp=22.0, hum=50.0)
    resp = client.get("/api/v1/rooms/r1/comfort")
    assert resp.status_code == 200
    assert resp.json()["thermal"] == "comfortable"
    assert resp.json()["hygric"] == "ok"
    resp = client.get("/api/v1/rooms/r2/comfort")
    assert resp.status_code == 404


# -- building endpoints -----------------------------------------------------------


def test_buildings_list(client):
    resp = client.get("/api/v1/buildings")
    assert resp.json() == {"buildings": [{"id": "b1", "name": "Test School"}]}


def seed_power(client, a=460.0, b=403.0, c=288.0, ts=1000, seq=1):
    readings = [
        reading_dict(node_id=900, metric="power_phase_a", value=a, ts=ts, seq=seq),
        reading_dict(node_id=900, metric="power_phase_b", value=b, ts=ts, seq=seq),
        reading_dict(node_id=900, metric="power_phase_c", value=c, ts=ts, seq=seq),
    ]
    assert ingest(client, readings, batch_id=f"pw{seq}").status_code == 200


def test_summary_composes_comfort_led_and_rings(client):
    seed_room(client, temp=22.0, hum=50.0, node_id=101)
    seed_room(client, temp=25.01, hum=71.0, node_id=102)
    seed_power(client)
    resp = client.get("/api/v1/buildings/b1/summary")
    assert resp.status_code == 200
    body = resp.json()
    rooms = {r["room_id"]: r for r in body["rooms"]}
    assert rooms["r1"]["led"] == "green"
    assert rooms["r1"]["comfort"] == {"thermal": "comfortable", "hygric": "ok"}
    assert rooms["r2"]["led"] == "red"
    assert rooms["r2"]["comfort"]["hygric"] == "too_humid"
    assert body["power"]["total"] == pytest.approx(1151.0)
    assert body["power"]["ring"]["total"] == 5  # 12 * 1151/3000 = 4.604 -> 5
    assert body["dials"]["power"]["level"] == 5
    # independent recomposition oracle
    for room_id, node in (("r1", 101), ("r2", 102)):
        latest = client.get(
            f"/api/v1/rooms/{room_id}/latest", params={"metric": "temperature"}
        ).json()
        hum = client.get(
            f"/api/v1/rooms/{room_id}/latest", params={"metric": "humidity"}
        ).json()
        expect = assess_comfort(latest["value"], hum["value"])
        assert rooms[room_id]["comfort"] == {
            "thermal": expect.thermal,
            "hygric": expect.hygric,
        }
        assert rooms[room_id]["led"] == led_color_for_temperature(latest["value"])
    assert body["power"]["ring"]["total"] == ring_level(1151.0, 0, 3000, 12)


def test_summary_threshold_boundary(client):
    seed_room(client, temp=25.0, hum=50.0, node_id=101)
    body = client.get("/api/v1/buildings/b1/summary").json()
    rooms = {r["room_id"]: r for r in body["rooms"]}
    assert rooms["r1"]["led"] == "green"  # 25.00 is not above 25


def test_summary_no_data_rooms(client):
    body = client.get("/api/v1/buildings/b1/summary").json()
    assert all(r["no_data"] for r in body["rooms"])
    assert body["power"]["total"] is None  # meter bound, nothing reported yet
    assert body["dials"]["temperature"]["value"] is None
    assert body["dials"]["temperature"]["level"] == 0


def test_power_latest(client):
    resp = client.get("/api/v1/buildings/b1/power/latest")
    assert resp.status_code == 404
    seed_power(client)
    resp = client.get("/api/v1/buildings/b1/power/latest")
    body = resp.json()
    assert body["total"] == pytest.approx(1151.0)
    assert body["power_phase_b"] == 403.0
    resp = client.get("/api/v1/buildings/zz/power/latest")
    assert resp.status_code == 404
    assert resp.json()["error"]["code"] == "not_found"


def test_energy_daily(client):
    day_start = 1_688_342_400  # 2023-07-03 00:00 UTC
    batch = []
    seq = 0
    for k in range(0, 1441, 60):  # hourly constant 1200 W
        seq += 1
        batch.append(
            reading_dict(
                node_id=900, metric="power_phase_a", value=1200.0,
                ts=day_start + k * 60, seq=seq,
            )
        )
    # hourly samples but 60 s nominal interval: bridge with a dense run instead
    resp = client.get("/api/v1/buildings/b1/energy/daily", params={"date": "2023-07-03"})
    assert resp.status_code == 404
    dense = [
        reading_dict(node_id=900, metric="power_phase_a", value=1000.0,
                     ts=day_start + k * 60, seq=k + 1)
        for k in range(0, 121)
    ]
    assert ingest(client, dense[:500], batch_id="e1").status_code == 200
    resp = client.get("/api/v1/buildings/b1/energy/daily", params={"date": "2023-07-03"})
    assert resp.status_code == 200
    assert resp.json()["power_phase_a"] == pytest.approx(1000.0 * 7200 / 3.6e6)
    bad = client.get("/api/v1/buildings/b1/energy/daily", params={"date": "03-07-2023"})
    assert bad.status_code == 400


# -- challenge over HTTP ------------------------------------------------------------


def test_challenge_flow_over_http(client):
    body = client.get("/api/v1/challenge/map", params={"student": "sa"}).json()
    status = {q["id"]: q["status"] for q in body["quests"]}
    assert status["start"] == "available"
    assert status["mid"] == "locked"
    assert status["bonus1"] == "locked"
    available = [q for q in body["quests"] if q["id"] == "start"][0]
    assert available["payload"]["quiz"]["choices"] == ["a", "b"]
    assert "correct_index" not in available["payload"]["quiz"]

    wrong = client.post(
        "/api/v1/challenge/quests/start/answer", json={"student": "sa", "answer": 0}
    )
    assert wrong.json()["correct"] is False
    right = client.post(
        "/api/v1/challenge/quests/start/answer", json={"student": "sa", "answer": 1}
    )
    assert right.json()["points_awarded"] == 10
    assert right.json()["class_score"] == 10

    gated = client.post(
        "/api/v1/challenge/quests/bonus1/answer", json={"student": "sa", "answer": 0}
    )
    assert gated.status_code == 409
    assert gated.json()["error"]["code"] == "gate_locked"

    activity = client.post(
        "/api/v1/challenge/class-activities",
        json={"teacher": "t1", "class_id": "c1", "topic": "heating"},
    ).json()
    assert activity["state"] == "part_a"
    for expected in ("part_b", "part_c", "complete"):
        advanced = client.post(
            f"/api/v1/challenge/class-activities/{activity['id']}/advance",
            json={"teacher": "t1"},
        ).json()
        assert advanced["state"] == expected
    too_far = client.post(
        f"/api/v1/challenge/class-activities/{activity['id']}/advance",
        json={"teacher": "t1"},
    )
    assert too_far.status_code == 409
    assert too_far.json()["error"]["code"] == "invalid_state"

    bonus_now = client.post(
        "/api/v1/challenge/quests/bonus1/answer", json={"student": "sa", "answer": 0}
    )
    assert bonus_now.json()["points_awarded"] == 5

    locked_kit = client.post(
        "/api/v1/challenge/quests/kit1/answer", json={"student": "sa", "answer": 0}
    )
    assert locked_kit.status_code == 409
    unlock = client.post(
        "/api/v1/challenge/labkit/unlock", json={"teacher": "t1", "class_id": "c1"}
    )
    assert unlock.json() == {"class_id": "c1", "unlocked": True}
    kit = client.post(
        "/api/v1/challenge/quests/kit1/answer", json={"student": "sa", "answer": 0}
    )
    assert kit.json()["points_awarded"] == 5


def test_live_quest_through_api(client):
    client.post("/api/v1/challenge/quests/start/answer", json={"student": "sa", "answer": 1})
    unresolvable = client.post(
        "/api/v1/challenge/quests/live/answer", json={"student": "sa", "answer": "r1"}
    )
    assert unresolvable.status_code == 409
    assert unresolvable.json()["error"]["code"] == "unresolvable"
    seed_room(client, temp=24.0, node_id=101)        # r1
    seed_room(client, temp=26.0, node_id=102)        # r2 warmest
    wrong = client.post(
        "/api/v1/challenge/quests/live/answer", json={"student": "sa", "answer": "r1"}
    )
    assert wrong.json()["correct"] is False
    right = client.post(
        "/api/v1/challenge/quests/live/answer", json={"student": "sa", "answer": "r2"}
    )
    assert right.json()["points_awarded"] == 15


def test_dashboard_and_snapshots_http(client):
    client.post("/api/v1/challenge/quests/start/answer", json={"student": "sc", "answer": 1})
    snap = client.post(
        "/api/v1/challenge/snapshots",
        json={"student": "sc", "text": "radiator on while window open", "room_id": "r1"},
    )
    assert snap.status_code == 200
    dash = client.get("/api/v1/challenge/dashboard", params={"scope": "global"}).json()
    assert dash["classes"][0]["class_id"] == "c2"
    assert dash["classes"][0]["snapshots"][0]["text"] == "radiator on while window open"
    listed = client.get("/api/v1/challenge/classes/c2/snapshots").json()
    assert len(listed["snapshots"]) == 1
    too_long = client.post(
        "/api/v1/challenge/snapshots", json={"student": "sc", "text": "x" * 501}
    )
    assert too_long.status_code == 400
    scoped = client.get(
        "/api/v1/challenge/dashboard", params={"scope": "school", "school_id": "s1"}
    ).json()
    assert {c["class_id"] for c in scoped["classes"]} == {"c1", "c2"}
    missing = client.get("/api/v1/challenge/dashboard", params={"scope": "school"})
    assert missing.status_code == 400


def test_teacher_authz_maps_to_409(client):
    resp = client.post(
        "/api/v1/challenge/class-activities",
        json={"teacher": "t2", "class_id": "c1", "topic": "x"},
    )
    assert resp.status_code == 409
    assert resp.json()["error"]["code"] == "authz"


def test_read_endpoints_are_side_effect_free(client):
    seed_room(client)
    seed_power(client)
    paths = [
        ("/api/v1/buildings", {}),
        ("/api/v1/buildings/b1/power/latest", {}),
        ("/api/v1/rooms/r1/latest", {"metric": "temperature"}),
        ("/api/v1/rooms/r1/series", {"metric": "temperature", "from": 0, "to": 10**9}),
        ("/api/v1/challenge/map", {"student": "sa"}),
        ("/api/v1/challenge/dashboard", {"scope": "global"}),
    ]
    for path, params in paths:
        first = client.get(path, params=params)
        second = client.get(path, params=params)
        assert first.status_code == second.status_code
        assert first.json() == second.json()


def test_summary_as_of_changes_are_only_timestamp(client):
    seed_room(client)
    a = client.get("/api/v1/buildings/b1/summary").json()
    b = client.get("/api/v1/buildings/b1/summary").json()
    a.pop("as_of"), b.pop("as_of")
    assert a == b


def test_series_point_cap(client, monkeypatch):
    import schoolsense.api as api_module

    monkeypatch.setattr(api_module, "MAX_SERIES_POINTS", 2)
    for i, ts in enumerate([100, 200, 300], 1):
        seed_room(client, room_seq=i, ts=ts)
    resp = client.get(
        "/api/v1/rooms/r1/series",
        params={"metric": "temperature", "from": 0, "to": 10**9},
    )
    assert resp.status_code == 400
    assert resp.json()["error"]["code"] == "too_many_points"


def test_summary_has_no_power_section_without_meter(tmp_path):
    import json as _json

    from schoolsense.api import build_summary
    from schoolsense.metrics import CLASSROOM_CODES
    from schoolsense.store import TelemetryStore
    from schoolsense.topology import NodeDescriptor, Registry

    from .conftest import make_topology

    registry = Registry(
        make_topology(1),
        [NodeDescriptor(5, "classroom", "r1", tuple(sorted(CLASSROOM_CODES)))],
    )
    store = TelemetryStore(registry, tmp_path)
    config = ApiConfig(storage_dir=tmp_path)
    summary = build_summary(store, registry, config, "b1", 100)
    assert summary["power"] is None
    assert _json.dumps(summary)  # still serializable
    store.close()


def test_config_from_env(monkeypatch, tmp_path):
    from schoolsense.api import config_from_env
    from schoolsense.errors import ConfigError

    monkeypatch.setenv("SCHOOLSENSE_GATEWAY_TOKEN", "sekrit")
    monkeypatch.setenv("SCHOOLSENSE_TZ", "Europe/Athens")
    monkeypatch.setenv("SCHOOLSENSE_DIAL_POWER", "100:5000")
    monkeypatch.setenv("SCHOOLSENSE_RING_LEDS", "24")
    config = config_from_env(tmp_path)
    assert config.gateway_token == "sekrit"
    assert config.timezone == "Europe/Athens"
    assert config.dials["power"] == (100.0, 5000.0)
    assert config.dials["humidity"] == (0.0, 100.0)  # default kept
    assert config.ring_leds == 24

    monkeypatch.setenv("SCHOOLSENSE_DIAL_POWER", "oops")
    with pytest.raises(ConfigError):
        config_from_env(tmp_path)
    monkeypatch.setenv("SCHOOLSENSE_DIAL_POWER", "9:3")
    with pytest.raises(ConfigError):
        config_from_env(tmp_path)
