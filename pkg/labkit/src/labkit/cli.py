"""labkit command line: poll the API and render the virtual board, or run one
of the scripted activities.

Exit codes: 0 success, 1 usage error, 2 API/runtime error.
"""

from __future__ import annotations

import argparse
import select
import sys
import time

import httpx

from .activities import ACTIVITIES, run_activity
from .board import BoardState, press_button, refresh, render
from .client import ApiClient, ApiError


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # noqa: A003 - argparse API
        raise _UsageError(message)


def build_parser() -> _Parser:
    parser = _Parser(prog="labkit", description=__doc__)
    parser.add_argument("--endpoint", required=True, help="API base URL")
    parser.add_argument("--activity", default=None, choices=ACTIVITIES,
                        help="run a scripted activity instead of the board")
    parser.add_argument("--building", default=None, help="building id (default: first)")
    parser.add_argument("--room", default=None, help="room to focus on the LCD")
    parser.add_argument("--date", default=None, help="day for energy_footprint (YYYY-MM-DD)")
    parser.add_argument("--interval", type=float, default=5.0, help="poll seconds")
    parser.add_argument("--frames", type=int, default=0,
                        help="stop after N rendered frames (0 = run until ^C)")
    parser.add_argument("--color", action="store_true", help="ANSI colored LEDs")
    return parser


def _pick_building(client: ApiClient, wanted: str | None) -> str:
    if wanted:
        return wanted
    buildings = client.buildings()
    if not buildings:
        raise ApiError(404, "no_data", "server has no buildings")
    return buildings[0]["id"]


def run_board(args, client: ApiClient) -> int:
    board = BoardState(
        building_id=_pick_building(client, args.building),
        focused_room=args.room,
    )
    frames = 0
    print("press ENTER to cycle modes, ^C to quit", file=sys.stderr)
    while True:
        refresh(board, client)
        sys.stdout.write(render(board, color=args.color))
        sys.stdout.write("\n")
        sys.stdout.flush()
        frames += 1
        if args.frames and frames >= args.frames:
            return 0
        # the button is a keypress: ENTER during the poll interval cycles modes
        ready, _, _ = select.select([sys.stdin], [], [], args.interval)
        if ready:
            sys.stdin.readline()
            press_button(board)


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

    client = ApiClient(args.endpoint)
    try:
        if args.activity:
            sys.stdout.write(
                run_activity(
                    args.activity, client,
                    _pick_building(client, args.building), args.date,
                )
            )
            return 0
        return run_board(args, client)
    except KeyboardInterrupt:
        return 0
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (ApiError, httpx.HTTPError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    finally:
        client.close()


if __name__ == "__main__":
    sys.exit(main())
