"""Metric registry and wire-value scaling.

Each metric has a one-byte wire code and a fixed integer scale; values travel
as 16-bit integers (signed only for temperature) and are converted back to
engineering units at the gateway.
"""

from __future__ import annotations

from dataclasses import dataclass
from decimal import ROUND_HALF_UP, Decimal

from .errors import RangeError, UnknownMetricError


@dataclass(frozen=True)
class Metric:
    name: str
    code: int
    unit: str
    scale: int        # wire value = engineering value * scale
    signed: bool
    lo: float         # engineering-unit range, inclusive
    hi: float


TEMPERATURE = Metric("temperature", 0x01, "degC", 100, True, -40.0, 85.0)
HUMIDITY = Metric("humidity", 0x02, "pct_rh", 100, False, 0.0, 100.0)
NOISE = Metric("noise", 0x03, "level", 1, False, 0.0, 1023.0)
MOTION = Metric("motion", 0x04, "events", 1, False, 0.0, 1000.0)
POWER_PHASE_A = Metric("power_phase_a", 0x10, "W", 1, False, 0.0, 65535.0)
POWER_PHASE_B = Metric("power_phase_b", 0x11, "W", 1, False, 0.0, 65535.0)
POWER_PHASE_C = Metric("power_phase_c", 0x12, "W", 1, False, 0.0, 65535.0)

METRICS = (
    TEMPERATURE,
    HUMIDITY,
    NOISE,
    MOTION,
    POWER_PHASE_A,
    POWER_PHASE_B,
    POWER_PHASE_C,
)

METRICS_BY_CODE = {m.code: m for m in METRICS}
METRICS_BY_NAME = {m.name: m for m in METRICS}

CLASSROOM_CODES = frozenset((TEMPERATURE.code, HUMIDITY.code, NOISE.code, MOTION.code))
POWER_CODES = frozenset((POWER_PHASE_A.code, POWER_PHASE_B.code, POWER_PHASE_C.code))
POWER_METRICS = (POWER_PHASE_A, POWER_PHASE_B, POWER_PHASE_C)


def metric_by_code(code: int) -> Metric:
    try:
        return METRICS_BY_CODE[code]
    except KeyError:
        raise UnknownMetricError(f"unknown metric code 0x{code:02X}") from None


def metric_by_name(name: str) -> Metric:
    try:
        return METRICS_BY_NAME[name]
    except KeyError:
        raise UnknownMetricError(f"unknown metric name {name!r}") from None


def round_half_away_from_zero(x: float | Decimal) -> int:
    """Round to the nearest integer, ties going away from zero."""
    d = x if isinstance(x, Decimal) else Decimal(str(x))
    return int(d.quantize(Decimal(1), rounding=ROUND_HALF_UP))


def to_wire(metric: Metric, value: float) -> int:
    """Scale an engineering-unit value to its integer wire form."""
    if not metric.lo <= value <= metric.hi:
        raise RangeError(
            f"{metric.name} value {value} outside [{metric.lo}, {metric.hi}]"
        )
    return round_half_away_from_zero(Decimal(str(value)) * metric.scale)


def from_wire(metric: Metric, wire: int) -> float:
    """Convert a wire integer back to engineering units."""
    value = wire / metric.scale
    if not metric.lo <= value <= metric.hi:
        raise RangeError(
            f"{metric.name} wire value {wire} decodes to {value}, "
            f"outside [{metric.lo}, {metric.hi}]"
        )
    return value
