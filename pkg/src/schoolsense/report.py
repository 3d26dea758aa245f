"""Figure rendering for exports: series line charts and daily-energy bars."""

from __future__ import annotations

from datetime import datetime, timezone
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.dates as mdates
import matplotlib.pyplot as plt

from .metrics import Metric
from .topology import Reading


def render_series_png(
    readings: list[Reading], metric: Metric, out_path: str | Path, title: str = ""
) -> None:
    """Plot one metric's series over time to a PNG file."""
    fig, ax = plt.subplots(figsize=(10, 4))
    times = [datetime.fromtimestamp(r.ts, tz=timezone.utc) for r in readings]
    values = [r.value for r in readings]
    ax.plot(times, values, lw=0.8)
    ax.set_ylabel(f"{metric.name} [{metric.unit}]")
    ax.set_title(title or metric.name)
    ax.grid(True, alpha=0.3)
    ax.xaxis.set_major_formatter(mdates.DateFormatter("%m-%d %H:%M"))
    fig.autofmt_xdate()
    fig.tight_layout()
    fig.savefig(out_path, dpi=120)
    plt.close(fig)


def render_daily_energy_png(
    energy: dict[str, float], date: str, out_path: str | Path
) -> None:
    """Bar chart of a day's kWh per phase plus the total."""
    labels = ["phase_a", "phase_b", "phase_c", "total"]
    values = [energy.get(k, 0.0) for k in labels]
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.bar(labels, values, color=["#4c72b0"] * 3 + ["#55a868"])
    ax.set_ylabel("energy [kWh]")
    ax.set_title(f"daily energy {date}")
    ax.grid(True, axis="y", alpha=0.3)
    fig.tight_layout()
    fig.savefig(out_path, dpi=120)
    plt.close(fig)
