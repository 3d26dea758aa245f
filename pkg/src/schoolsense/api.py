"""HTTP face of the platform.

Exposes real-time and historical readings, building summaries, ingestion, and
the challenge endpoints under /api/v1, all JSON. Errors use the envelope
{"error": {"code": ..., "message": ...}}.
"""

from __future__ import annotations

import os
import time
from dataclasses import dataclass, field
from datetime import date as date_cls
from pathlib import Path

from fastapi import Body, FastAPI, Header, Query, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from starlette.exceptions import HTTPException as StarletteHTTPException
from starlette.staticfiles import StaticFiles

from . import display
from .challenge import ChallengeEngine
from .errors import (
    AuthzError,
    ConfigError,
    GateError,
    NotFoundError,
    RangeError,
    SchoolSenseError,
    StateError,
    UnresolvableError,
    ValidationError,
)
from .metrics import METRICS_BY_NAME, POWER_METRICS, metric_by_name
from .questmap import KIND_LIVE, load_quest_map
from .roster import load_roster
from .store import AGG_FNS, TelemetryStore
from .topology import Registry, load_fleet_file

MAX_SERIES_POINTS = 100_000

FLEET_FILE = "fleet.json"
ROSTER_FILE = "roster.json"
QUESTMAP_FILE = "questmap.json"
CHALLENGE_EVENTS = "challenge/events.log"

DEFAULT_DIALS = {
    "power": (0.0, 3000.0),
    "temperature": (0.0, 40.0),
    "humidity": (0.0, 100.0),
}


@dataclass
class ApiConfig:
    storage_dir: Path
    gateway_token: str = "local-dev-token"
    timezone: str = "UTC"
    dials: dict[str, tuple[float, float]] = field(
        default_factory=lambda: dict(DEFAULT_DIALS)
    )
    ring_leds: int = display.DEFAULT_RING_LEDS
    static_dir: Path | None = None


def _parse_dial(raw: str) -> tuple[float, float]:
    lo, _, hi = raw.partition(":")
    try:
        lo_f, hi_f = float(lo), float(hi)
    except ValueError:
        raise ConfigError(f"dial range {raw!r} is not lo:hi") from None
    if lo_f >= hi_f:
        raise ConfigError(f"dial range {raw!r} is empty")
    return lo_f, hi_f


def config_from_env(storage_dir: str | Path | None = None) -> ApiConfig:
    """Build an ApiConfig from SCHOOLSENSE_* environment variables."""
    env = os.environ
    storage = storage_dir or env.get("SCHOOLSENSE_STORAGE", "./storage")
    dials = dict(DEFAULT_DIALS)
    for name in dials:
        raw = env.get(f"SCHOOLSENSE_DIAL_{name.upper()}")
        if raw:
            dials[name] = _parse_dial(raw)
    static = env.get("SCHOOLSENSE_STATIC")
    return ApiConfig(
        storage_dir=Path(storage),
        gateway_token=env.get("SCHOOLSENSE_GATEWAY_TOKEN", "local-dev-token"),
        timezone=env.get("SCHOOLSENSE_TZ", "UTC"),
        dials=dials,
        ring_leds=int(env.get("SCHOOLSENSE_RING_LEDS", display.DEFAULT_RING_LEDS)),
        static_dir=Path(static) if static else None,
    )


_ERROR_CODES = [
    (NotFoundError, 404, "not_found"),
    (GateError, 409, "gate_locked"),
    (StateError, 409, "invalid_state"),
    (AuthzError, 409, "authz"),
    (UnresolvableError, 409, "unresolvable"),
    (RangeError, 400, "range"),
    (ValidationError, 400, "validation"),
    (ConfigError, 400, "config"),
]


def _error_response(status: int, code: str, message: str) -> JSONResponse:
    return JSONResponse(
        status_code=status, content={"error": {"code": code, "message": message}}
    )


def build_summary(
    store: TelemetryStore, registry: Registry, config: ApiConfig, building_id: str, now: int
) -> dict:
    """Compose the per-room comfort/LED view and the power dial section."""
    topo = registry.topology
    rooms = []
    temp_values: list[float] = []
    hum_values: list[float] = []
    for room in sorted(topo.rooms_of_building(building_id), key=lambda r: r.id):
        temp = store.latest("room", room.id, METRICS_BY_NAME["temperature"])
        hum = store.latest("room", room.id, METRICS_BY_NAME["humidity"])
        entry: dict = {
            "room_id": room.id,
            "name": room.name,
            "orientation": room.orientation,
            "no_data": temp is None and hum is None,
            "temperature": temp.value if temp else None,
            "humidity": hum.value if hum else None,
            "ts": max(r.ts for r in (temp, hum) if r) if (temp or hum) else None,
            "comfort": None,
            "led": None,
        }
        if temp is not None:
            entry["led"] = display.led_color_for_temperature(temp.value)
            temp_values.append(temp.value)
        if hum is not None:
            hum_values.append(hum.value)
        if temp is not None and hum is not None:
            comfort = display.assess_comfort(temp.value, hum.value)
            entry["comfort"] = {"thermal": comfort.thermal, "hygric": comfort.hygric}
        rooms.append(entry)

    meters = registry.power_nodes_of_building(building_id)
    power = None
    total_power = None
    if meters:
        phases = {
            m.name: store.latest("building", building_id, m) for m in POWER_METRICS
        }
        values = {name: (r.value if r else None) for name, r in phases.items()}
        present = [v for v in values.values() if v is not None]
        total_power = sum(present) if present else None
        ring = None
        if present:
            lo, hi = config.dials["power"]
            ring = {
                name: display.ring_level(v, lo, hi, config.ring_leds)
                for name, v in values.items()
                if v is not None
            }
            ring["total"] = display.ring_level(total_power, lo, hi, config.ring_leds)
        power = {
            **values,
            "total": total_power,
            "ts": max((r.ts for r in phases.values() if r), default=None),
            "ring": ring,
        }

    def dial(name: str, value: float | None) -> dict:
        if value is None:
            return {"value": None, "level": 0}
        lo, hi = config.dials[name]
        return {"value": value, "level": display.ring_level(value, lo, hi, config.ring_leds)}

    dials = {
        "power": dial("power", total_power),
        "temperature": dial(
            "temperature", sum(temp_values) / len(temp_values) if temp_values else None
        ),
        "humidity": dial(
            "humidity", sum(hum_values) / len(hum_values) if hum_values else None
        ),
    }
    return {
        "building_id": building_id,
        "as_of": now,
        "rooms": rooms,
        "power": power,
        "dials": dials,
        "ring_leds": config.ring_leds,
    }


def create_app(config: ApiConfig) -> FastAPI:
    """Wire the store, registry and challenge engine into the HTTP app."""
    storage = Path(config.storage_dir)
    registry = load_fleet_file(storage / FLEET_FILE)
    store = TelemetryStore(registry, storage, timezone=config.timezone)
    roster = load_roster(storage / ROSTER_FILE)
    quest_map = load_quest_map(storage / QUESTMAP_FILE)

    def live_resolver(building_id: str, metric_name: str) -> dict[str, float]:
        try:
            rooms = registry.topology.rooms_of_building(building_id)
        except NotFoundError:
            return {}
        metric = metric_by_name(metric_name)
        out = {}
        for room in rooms:
            reading = store.latest("room", room.id, metric)
            if reading is not None:
                out[room.id] = reading.value
        return out

    engine = ChallengeEngine(
        quest_map, roster, storage / CHALLENGE_EVENTS, live_resolver=live_resolver
    )

    app = FastAPI(title="schoolsense", version="0.1.0")
    app.state.store = store
    app.state.registry = registry
    app.state.engine = engine
    app.state.config = config

    @app.exception_handler(SchoolSenseError)
    def handle_domain_error(request: Request, exc: SchoolSenseError):
        for klass, status, code in _ERROR_CODES:
            if isinstance(exc, klass):
                return _error_response(status, code, str(exc))
        return _error_response(500, "internal", str(exc))

    @app.exception_handler(RequestValidationError)
    def handle_request_validation(request: Request, exc: RequestValidationError):
        return _error_response(400, "validation", str(exc.errors()[:3]))

    @app.exception_handler(StarletteHTTPException)
    def handle_http_error(request: Request, exc: StarletteHTTPException):
        code = {404: "not_found", 401: "unauthorized", 405: "method_not_allowed"}.get(
            exc.status_code, "http_error"
        )
        return _error_response(exc.status_code, code, str(exc.detail))

    def _metric(name: str):
        if name not in METRICS_BY_NAME:
            raise ValidationError(f"unknown metric {name!r}")
        return METRICS_BY_NAME[name]

    def _reading_dict(reading) -> dict:
        return {
            "node_id": reading.node_id,
            "value": reading.value,
            "ts": reading.ts,
            "seq": reading.seq,
        }

    # -- telemetry ----------------------------------------------------------

    @app.post("/api/v1/ingest")
    def ingest(
        payload: dict = Body(...),
        x_gateway_token: str | None = Header(default=None),
    ):
        if x_gateway_token != config.gateway_token:
            return _error_response(401, "unauthorized", "bad or missing gateway token")
        return store.ingest(payload).to_json_dict()

    @app.get("/api/v1/buildings")
    def list_buildings():
        return {
            "buildings": [
                {"id": b.id, "name": b.name} for b in registry.topology.buildings
            ]
        }

    @app.get("/api/v1/buildings/{building_id}/summary")
    def building_summary(building_id: str):
        return build_summary(store, registry, config, building_id, int(time.time()))

    @app.get("/api/v1/buildings/{building_id}/power/latest")
    def power_latest(building_id: str):
        meters = registry.power_nodes_of_building(building_id)
        if not meters:
            return _error_response(404, "no_data", "no power meter bound")
        phases = {
            m.name: store.latest("building", building_id, m) for m in POWER_METRICS
        }
        if all(r is None for r in phases.values()):
            return _error_response(404, "no_data", "no power readings yet")
        values = {name: (r.value if r else None) for name, r in phases.items()}
        present = [v for v in values.values() if v is not None]
        return {
            "building_id": building_id,
            **values,
            "total": sum(present),
            "ts": max(r.ts for r in phases.values() if r),
        }

    @app.get("/api/v1/buildings/{building_id}/energy/daily")
    def energy_daily(building_id: str, date: str = Query(...)):
        try:
            day = date_cls.fromisoformat(date)
        except ValueError:
            raise ValidationError(f"date {date!r} is not YYYY-MM-DD") from None
        registry.power_nodes_of_building(building_id)  # 404 on unknown building
        result = store.daily_energy(building_id, day)
        if result is None:
            return _error_response(404, "no_data", f"no power samples on {date}")
        return {
            "building_id": building_id,
            "date": date,
            "timezone": config.timezone,
            **result,
        }

    @app.get("/api/v1/rooms/{room_id}/latest")
    def room_latest(room_id: str, metric: str = Query(...)):
        reading = store.latest("room", room_id, _metric(metric))
        if reading is None:
            return _error_response(404, "no_data", f"no {metric} readings for {room_id}")
        return {"room_id": room_id, "metric": metric, **_reading_dict(reading)}

    @app.get("/api/v1/rooms/{room_id}/series")
    def room_series(
        room_id: str,
        metric: str = Query(...),
        from_ts: int = Query(..., alias="from"),
        to_ts: int = Query(..., alias="to"),
    ):
        readings = store.series("room", room_id, _metric(metric), from_ts, to_ts)
        if len(readings) > MAX_SERIES_POINTS:
            return _error_response(
                400, "too_many_points", f"series exceeds {MAX_SERIES_POINTS} points"
            )
        return {
            "room_id": room_id,
            "metric": metric,
            "from": from_ts,
            "to": to_ts,
            "readings": [_reading_dict(r) for r in readings],
        }

    @app.get("/api/v1/rooms/{room_id}/aggregate")
    def room_aggregate(
        room_id: str,
        metric: str = Query(...),
        from_ts: int = Query(..., alias="from"),
        to_ts: int = Query(..., alias="to"),
        window: int = Query(...),
        fn: str = Query(...),
    ):
        if fn not in AGG_FNS:
            raise ValidationError(f"fn must be one of {', '.join(AGG_FNS)}")
        points = store.aggregate(
            "room", room_id, _metric(metric), from_ts, to_ts, window, fn
        )
        return {
            "room_id": room_id,
            "metric": metric,
            "window": window,
            "fn": fn,
            "points": [
                {
                    "window_start": p.window_start,
                    "value": p.value,
                    "sample_count": p.sample_count,
                }
                for p in points
            ],
        }

    @app.get("/api/v1/rooms/{room_id}/comfort")
    def room_comfort(room_id: str):
        temp = store.latest("room", room_id, METRICS_BY_NAME["temperature"])
        hum = store.latest("room", room_id, METRICS_BY_NAME["humidity"])
        if temp is None or hum is None:
            return _error_response(404, "no_data", f"missing readings for {room_id}")
        comfort = display.assess_comfort(temp.value, hum.value)
        return {
            "room_id": room_id,
            "temperature": temp.value,
            "humidity": hum.value,
            "thermal": comfort.thermal,
            "hygric": comfort.hygric,
            "ts": max(temp.ts, hum.ts),
        }

    # -- challenge ------------------------------------------------------------

    @app.get("/api/v1/challenge/map")
    def challenge_map(student: str = Query(...)):
        status = engine.quest_status(student)
        class_id = roster.class_of_student(student)
        quests = []
        for qid, quest in sorted(
            quest_map.quests.items(), key=lambda kv: (kv[1].area, kv[0])
        ):
            entry: dict = {
                "id": qid,
                "area": quest.area,
                "points": quest.points,
                "kind": quest.kind,
                "prerequisites": sorted(quest.prerequisites),
                "status": status[qid],
                "payload": None,
                "points_awarded": None,
            }
            if status[qid] != "locked":
                if quest.kind == KIND_LIVE:
                    entry["payload"] = {
                        "live_data": {
                            "target": quest.live.target,
                            "metric": quest.live.metric,
                            "reduce": quest.live.reduce,
                        }
                    }
                else:
                    entry["payload"] = {
                        "quiz": {
                            "question": quest.quiz.question,
                            "choices": list(quest.quiz.choices),
                        }
                    }
            if status[qid] == "answered":
                entry["points_awarded"] = quest.points
            quests.append(entry)
        return {
            "student_id": student,
            "class_id": class_id,
            "score": engine.student_score(student),
            "class_score": engine.class_score(class_id),
            "quests": quests,
        }

    @app.post("/api/v1/challenge/quests/{quest_id}/answer")
    def answer_quest(quest_id: str, body: dict = Body(...)):
        student = body.get("student")
        if not isinstance(student, str):
            raise ValidationError("body needs a string 'student'")
        if "answer" not in body:
            raise ValidationError("body needs an 'answer'")
        result = engine.answer_quest(
            student, quest_id, body["answer"], now=int(time.time())
        )
        class_id = roster.class_of_student(student)
        return {
            "quest_id": quest_id,
            **result,
            "student_score": engine.student_score(student),
            "class_score": engine.class_score(class_id),
        }

    @app.post("/api/v1/challenge/class-activities")
    def start_activity(body: dict = Body(...)):
        for key in ("teacher", "class_id", "topic"):
            if not isinstance(body.get(key), str):
                raise ValidationError(f"body needs a string {key!r}")
        activity = engine.start_class_activity(
            body["teacher"], body["class_id"], body["topic"], now=int(time.time())
        )
        return activity.to_json_dict()

    @app.post("/api/v1/challenge/class-activities/{activity_id}/advance")
    def advance_activity(activity_id: str, body: dict = Body(...)):
        teacher = body.get("teacher")
        if not isinstance(teacher, str):
            raise ValidationError("body needs a string 'teacher'")
        return engine.advance_class_activity(activity_id, teacher).to_json_dict()

    @app.post("/api/v1/challenge/labkit/unlock")
    def unlock_labkit(body: dict = Body(...)):
        for key in ("teacher", "class_id"):
            if not isinstance(body.get(key), str):
                raise ValidationError(f"body needs a string {key!r}")
        engine.unlock_labkit_quests(body["teacher"], body["class_id"], now=int(time.time()))
        return {"class_id": body["class_id"], "unlocked": True}

    @app.get("/api/v1/challenge/dashboard")
    def dashboard(scope: str = Query(...), school_id: str | None = Query(default=None)):
        return {"scope": scope, "classes": engine.dashboard(scope, school_id)}

    @app.post("/api/v1/challenge/snapshots")
    def submit_snapshot(body: dict = Body(...)):
        student = body.get("student")
        text = body.get("text")
        if not isinstance(student, str) or not isinstance(text, str):
            raise ValidationError("body needs string 'student' and 'text'")
        room_id = body.get("room_id")
        if room_id is not None and not isinstance(room_id, str):
            raise ValidationError("room_id must be a string")
        snap = engine.submit_snapshot(student, text, now=int(time.time()), room_id=room_id)
        return snap.to_json_dict()

    @app.get("/api/v1/challenge/classes/{class_id}/snapshots")
    def class_snapshots(class_id: str):
        return {
            "class_id": class_id,
            "snapshots": [s.to_json_dict() for s in engine.class_snapshots(class_id, 100)],
        }

    if config.static_dir is not None and Path(config.static_dir).is_dir():
        app.mount(
            "/app", StaticFiles(directory=config.static_dir, html=True), name="app"
        )

    return app
