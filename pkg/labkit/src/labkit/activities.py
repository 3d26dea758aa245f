"""The two scripted activities: per-room thermal comfort, and the building's
daily energy footprint."""

from __future__ import annotations

from datetime import date, timedelta

from .client import ApiClient

ACTIVITIES = ("thermal_comfort", "energy_footprint")


def thermal_comfort_report(client: ApiClient, building_id: str) -> str:
    summary = client.summary(building_id)
    lines = [
        f"Thermal comfort in building {building_id}",
        f"{'room':<6} {'temperature':>12} {'humidity':>9} {'thermal':>12} {'hygric':>10}",
    ]
    for room in summary["rooms"]:
        if room["no_data"] or room["comfort"] is None:
            lines.append(f"{room['room_id']:<6} {'no data':>12}")
            continue
        lines.append(
            f"{room['room_id']:<6} {room['temperature']:>10.2f} C "
            f"{room['humidity']:>7.1f} % {room['comfort']['thermal']:>12} "
            f"{room['comfort']['hygric']:>10}"
        )
    lines.append("")
    lines.append(
        "Compare the rooms: which differ, and why? Think about orientation, "
        "floor, windows and how each room is used."
    )
    return "\n".join(lines) + "\n"


def energy_footprint_report(
    client: ApiClient, building_id: str, day: str | None = None
) -> str:
    if day is None:
        day = (date.today() - timedelta(days=1)).isoformat()
    energy = client.daily_energy(building_id, day)
    lines = [f"Energy footprint of building {building_id} on {day}"]
    for phase in ("power_phase_a", "power_phase_b", "power_phase_c"):
        lines.append(f"  {phase}: {energy[phase]:.3f} kWh")
    lines.append(f"  total: {energy['total']:.3f} kWh")
    return "\n".join(lines) + "\n"


def run_activity(
    name: str, client: ApiClient, building_id: str, day: str | None = None
) -> str:
    if name == "thermal_comfort":
        return thermal_comfort_report(client, building_id)
    if name == "energy_footprint":
        return energy_footprint_report(client, building_id, day)
    raise ValueError(f"unknown activity {name!r}; pick one of {', '.join(ACTIVITIES)}")
