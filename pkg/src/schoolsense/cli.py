"""Operator command line: run the simulator, server and gateway replay,
seed demo data, and export series.

Exit codes: 0 success, 1 usage error, 2 runtime error.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
import time
from pathlib import Path

from .api import config_from_env, create_app
from .demo import seed_demo
from .errors import SchoolSenseError
from .gateway import Gateway
from .metrics import metric_by_name
from .replay import iter_replay, write_replay
from .sim import FleetSimulator, sim_config_from_dict
from .store import TelemetryStore
from .topology import load_fleet_file


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # noqa: A003 - argparse API
        raise _UsageError(message)


def build_parser() -> _Parser:
    parser = _Parser(prog="schoolsense", description=__doc__)
    sub = parser.add_subparsers(dest="verb", required=True)

    p_sim = sub.add_parser("sim", help="run the fleet simulator into a replay file")
    p_sim.add_argument("--config", required=True, help="SimConfig JSON file")
    p_sim.add_argument("--hours", type=float, default=24.0)
    p_sim.add_argument("--out", required=True, help="replay file to write")
    p_sim.add_argument(
        "--start-ts", type=int, default=None,
        help="override the config's start timestamp (unix seconds)",
    )

    p_serve = sub.add_parser("serve", help="run the HTTP API service")
    p_serve.add_argument("--storage", required=True, help="storage directory")
    p_serve.add_argument("--listen", default="127.0.0.1:8000", help="host:port")
    p_serve.add_argument("--static", default=None, help="static assets dir for /app")

    p_seed = sub.add_parser("seed-demo", help="seed demo topology, roster, quest map and history")
    p_seed.add_argument("--storage", required=True)
    p_seed.add_argument("--hours", type=float, default=24.0)
    p_seed.add_argument("--start-ts", type=int, default=None)

    p_replay = sub.add_parser("replay", help="drive the gateway from a replay file")
    p_replay.add_argument("--in", dest="infile", required=True)
    p_replay.add_argument("--endpoint", required=True, help="API base URL")
    p_replay.add_argument("--token", default=None, help="gateway token (default from env)")
    p_replay.add_argument("--gateway-id", default="gw-replay")

    p_export = sub.add_parser("export", help="export a room series as CSV")
    p_export.add_argument("--storage", required=True)
    p_export.add_argument("--room", required=True)
    p_export.add_argument("--metric", required=True)
    p_export.add_argument("--from", dest="from_ts", type=int, required=True)
    p_export.add_argument("--to", dest="to_ts", type=int, required=True)
    p_export.add_argument("--format", choices=["csv"], default="csv")
    p_export.add_argument("--out", default="-", help="output file, '-' for stdout")
    p_export.add_argument("--plot", default=None, help="also render a PNG chart here")

    p_demo = sub.add_parser("demo", help="seed-demo then serve")
    p_demo.add_argument("--storage", required=True)
    p_demo.add_argument("--listen", default="127.0.0.1:8000")
    p_demo.add_argument("--hours", type=float, default=24.0)
    p_demo.add_argument("--static", default=None)

    return parser


def _cmd_sim(args) -> int:
    with open(args.config, encoding="utf-8") as fh:
        raw = json.load(fh)
    if args.start_ts is not None:
        raw["start_ts"] = args.start_ts
    duration = int(args.hours * 3600)
    fallback_start = (int(time.time()) // 60) * 60 - duration
    config = sim_config_from_dict(raw, start_ts=fallback_start)
    sim = FleetSimulator(config)
    frames = sim.advance(config.start_ts + duration)
    count = write_replay(frames, args.out)
    print(f"wrote {count} frames to {args.out}")
    return 0


def _run_server(storage: str, listen: str, static: str | None) -> int:
    import uvicorn

    config = config_from_env(storage)
    if static is not None:
        config.static_dir = Path(static)
    app = create_app(config)
    host, _, port = listen.rpartition(":")
    if not host or not port.isdigit():
        raise _UsageError(f"--listen must be host:port, got {listen!r}")
    uvicorn.run(app, host=host, port=int(port), log_level="warning")
    return 0


def _cmd_serve(args) -> int:
    return _run_server(args.storage, args.listen, args.static)


def _cmd_seed_demo(args) -> int:
    stats = seed_demo(args.storage, hours=args.hours, start_ts=args.start_ts, quiet=False)
    rejected = {
        k: v
        for k, v in stats["counters"].items()
        if k not in ("accepted", "uploaded_batches")
    }
    if rejected:
        print(f"gateway counters: {rejected}")
    return 0


def _cmd_replay(args) -> int:
    import httpx

    endpoint = args.endpoint.rstrip("/")
    if not endpoint.endswith("/api/v1/ingest"):
        endpoint += "/api/v1/ingest"
    token = args.token or config_from_env().gateway_token
    gateway = Gateway(args.gateway_id)
    sent = 0

    with httpx.Client(timeout=10.0) as client:
        def post(batch) -> bool:
            resp = client.post(
                endpoint,
                json=batch.to_json_dict(),
                headers={"X-Gateway-Token": token},
            )
            return resp.status_code == 200

        def send_until_acked(batch) -> None:
            nonlocal sent
            while True:
                try:
                    ok = post(batch)
                except httpx.HTTPError:
                    ok = False
                gateway.handle_upload_result(batch.batch_id, ok, time.time())
                if ok:
                    sent += len(batch.readings)
                    return
                retry_at = gateway.next_retry_at(time.time())
                if retry_at is not None:
                    time.sleep(max(0.0, retry_at - time.time()))

        for frame in iter_replay(args.infile):
            gateway.accept_frame(frame, time.time())
            while gateway.buffered >= gateway.batch_size:
                batch = gateway.flush(time.time())
                if batch is None:
                    break
                send_until_acked(batch)
        while gateway.buffered:
            batch = gateway.flush(time.time(), force=True)
            if batch is None:
                break
            send_until_acked(batch)

    print(f"uploaded {sent} readings; counters: {dict(gateway.counters)}")
    return 0


def _cmd_export(args) -> int:
    registry = load_fleet_file(Path(args.storage) / "fleet.json")
    store = TelemetryStore(registry, args.storage)
    try:
        metric = metric_by_name(args.metric)
        readings = store.series("room", args.room, metric, args.from_ts, args.to_ts)
    finally:
        store.close()

    out = sys.stdout if args.out == "-" else open(args.out, "w", newline="")
    try:
        writer = csv.writer(out)
        writer.writerow(["ts", "node_id", "metric", "value"])
        for r in readings:
            writer.writerow([r.ts, r.node_id, r.metric.name, r.value])
    finally:
        if out is not sys.stdout:
            out.close()

    if args.plot:
        from .report import render_series_png

        render_series_png(readings, metric, args.plot, title=f"{args.room} {metric.name}")
    if args.out != "-":
        print(f"wrote {len(readings)} rows to {args.out}")
    return 0


def _cmd_demo(args) -> int:
    seed_demo(args.storage, hours=args.hours, quiet=False)
    return _run_server(args.storage, args.listen, args.static)


_COMMANDS = {
    "sim": _cmd_sim,
    "serve": _cmd_serve,
    "seed-demo": _cmd_seed_demo,
    "replay": _cmd_replay,
    "export": _cmd_export,
    "demo": _cmd_demo,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        parser.print_usage(sys.stderr)
        return 1
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    try:
        return _COMMANDS[args.verb](args)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (SchoolSenseError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
