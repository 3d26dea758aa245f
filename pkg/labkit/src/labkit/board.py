"""The virtual board: 2-color LED per room, a 2x16 LCD, three ring dials,
and a button that cycles visualization modes.

Every color and dial level is taken verbatim from the building summary
endpoint; the board holds presentation state (mode, focus, staleness) only.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import httpx

from .client import ApiClient

MODES = ("temperature", "humidity", "comfort")

LCD_COLS = 16
LCD_ROWS = 2

GREEN = "green"
RED = "red"

_ANSI = {GREEN: "\x1b[32m", RED: "\x1b[31m", None: "\x1b[2m"}
_RESET = "\x1b[0m"


@dataclass
class BoardState:
    building_id: str
    mode: str = "temperature"
    summary: dict | None = None
    fetched_at: float | None = None
    stale: bool = False
    focused_room: str | None = None
    ring_leds: int = 12
    rings: dict = field(default_factory=lambda: {"power": 0, "temperature": 0, "humidity": 0})
    leds: dict = field(default_factory=dict)        # room id -> green/red/None
    lcd: list[str] = field(default_factory=lambda: ["", ""])

    def rooms(self) -> list[dict]:
        return self.summary["rooms"] if self.summary else []


def room_led(room: dict, mode: str) -> str | None:
    """Color of a room tile in the given mode, from server-reported fields."""
    if mode == "temperature":
        return room["led"]
    comfort = room.get("comfort")
    if comfort is None:
        return None
    if mode == "humidity":
        return GREEN if comfort["hygric"] == "ok" else RED
    return GREEN if comfort["thermal"] == "comfortable" else RED


def _lcd_lines(room: dict | None, mode: str) -> list[str]:
    if room is None:
        return ["no room", "no data"]
    line1 = f"{room['room_id']} {room['name']}"
    if room.get("no_data"):
        line2 = "no data"
    elif mode == "temperature":
        line2 = "no data" if room["temperature"] is None else f"T {room['temperature']:.2f} C"
    elif mode == "humidity":
        line2 = "no data" if room["humidity"] is None else f"RH {room['humidity']:.1f} %"
    else:
        comfort = room.get("comfort")
        line2 = "no data" if comfort is None else f"{comfort['thermal']}/{comfort['hygric']}"
    # truncate, never wrap
    return [line1[:LCD_COLS], line2[:LCD_COLS]]


def _derive(board: BoardState) -> None:
    """Recompute LEDs, LCD and rings from the cached summary for board.mode."""
    if board.summary is None:
        return
    rooms = board.rooms()
    board.leds = {r["room_id"]: room_led(r, board.mode) for r in rooms}
    board.ring_leds = board.summary["ring_leds"]
    board.rings = {
        name: board.summary["dials"][name]["level"]
        for name in ("power", "temperature", "humidity")
    }
    if board.focused_room is None and rooms:
        board.focused_room = rooms[0]["room_id"]
    focus = next((r for r in rooms if r["room_id"] == board.focused_room), None)
    board.lcd = _lcd_lines(focus, board.mode)


def refresh(board: BoardState, client: ApiClient, now: float | None = None) -> BoardState:
    """Fetch the latest summary; on network failure keep data and go stale."""
    try:
        board.summary = client.summary(board.building_id)
        board.fetched_at = time.time() if now is None else now
        board.stale = False
    except httpx.HTTPError:
        board.stale = True
    _derive(board)
    return board


def press_button(board: BoardState) -> BoardState:
    """Cycle temperature -> humidity -> comfort -> temperature."""
    board.mode = MODES[(MODES.index(board.mode) + 1) % len(MODES)]
    _derive(board)
    return board


def _ring_bar(level: int, n: int) -> str:
    return "#" * level + "-" * (n - level)


def render(board: BoardState, color: bool = False, now: float | None = None) -> str:
    """One deterministic text frame of the whole board."""
    lines = []
    header = f"building {board.building_id}  mode: {board.mode}"
    if board.stale:
        age = ""
        if board.fetched_at is not None:
            ref = time.time() if now is None else now
            age = f" {int(ref - board.fetched_at)}s old"
        header += f"  [STALE{age}]"
    lines.append(header)
    if board.summary is None:
        lines.append("  (no data yet)")
        return "\n".join(lines) + "\n"
    for room in board.rooms():
        led = board.leds.get(room["room_id"])
        mark = {GREEN: "[G]", RED: "[R]", None: "[ ]"}[led]
        if color:
            mark = f"{_ANSI[led]}{mark}{_RESET}"
        value = "no data"
        if room["temperature"] is not None or room["humidity"] is not None:
            temp = "-" if room["temperature"] is None else f"{room['temperature']:.2f}C"
            hum = "-" if room["humidity"] is None else f"{room['humidity']:.1f}%"
            value = f"{temp} {hum}"
        lines.append(f"  {room['room_id']} {mark} {value}")
    lines.append("  LCD: |" + board.lcd[0].ljust(LCD_COLS) + "|")
    lines.append("       |" + board.lcd[1].ljust(LCD_COLS) + "|")
    n = board.ring_leds
    lines.append(
        "  rings: "
        + "  ".join(
            f"{name} [{_ring_bar(board.rings[name], n)}] {board.rings[name]}/{n}"
            for name in ("power", "temperature", "humidity")
        )
    )
    return "\n".join(lines) + "\n"
