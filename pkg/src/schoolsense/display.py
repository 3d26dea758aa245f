"""Visualization mappings: comfort bands, room LED color, LED-ring dials.

Pure functions; the API, the simulator's consumers and the lab-kit client all
derive their colors and dial levels from here so they can never disagree.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ConfigError, RangeError
from .metrics import HUMIDITY, TEMPERATURE

THERMAL_TOO_COLD = "too_cold"
THERMAL_COMFORTABLE = "comfortable"
THERMAL_TOO_WARM = "too_warm"
HYGRIC_TOO_DRY = "too_dry"
HYGRIC_OK = "ok"
HYGRIC_TOO_HUMID = "too_humid"

LED_GREEN = "green"
LED_RED = "red"

LED_TEMP_THRESHOLD_C = 25.0
DEFAULT_RING_LEDS = 12


@dataclass(frozen=True)
class ComfortBands:
    """Classroom comfort thresholds; boundaries belong to the comfortable band."""

    temp_lo: float = 20.0
    temp_hi: float = 26.0
    rh_lo: float = 30.0
    rh_hi: float = 70.0


DEFAULT_BANDS = ComfortBands()


@dataclass(frozen=True)
class ComfortAssessment:
    thermal: str
    hygric: str


def assess_comfort(
    temp_c: float, rh_pct: float, bands: ComfortBands = DEFAULT_BANDS
) -> ComfortAssessment:
    """Categorize temperature and humidity against the comfort bands."""
    if not TEMPERATURE.lo <= temp_c <= TEMPERATURE.hi:
        raise RangeError(f"temperature {temp_c} outside metric range")
    if not HUMIDITY.lo <= rh_pct <= HUMIDITY.hi:
        raise RangeError(f"humidity {rh_pct} outside metric range")
    if temp_c < bands.temp_lo:
        thermal = THERMAL_TOO_COLD
    elif temp_c > bands.temp_hi:
        thermal = THERMAL_TOO_WARM
    else:
        thermal = THERMAL_COMFORTABLE
    if rh_pct < bands.rh_lo:
        hygric = HYGRIC_TOO_DRY
    elif rh_pct > bands.rh_hi:
        hygric = HYGRIC_TOO_HUMID
    else:
        hygric = HYGRIC_OK
    return ComfortAssessment(thermal, hygric)


def led_color_for_temperature(
    temp_c: float, threshold: float = LED_TEMP_THRESHOLD_C
) -> str:
    """Red strictly above the threshold, green otherwise."""
    if not TEMPERATURE.lo <= temp_c <= TEMPERATURE.hi:
        raise RangeError(f"temperature {temp_c} outside metric range")
    return LED_RED if temp_c > threshold else LED_GREEN


def ring_level(value: float, lo: float, hi: float, n_leds: int = DEFAULT_RING_LEDS) -> int:
    """How many LEDs of an n-LED ring dial to light for a value.

    Linear between lo and hi, clamped, ties rounded up; monotone in value and
    exactly 0 at or below lo, exactly n_leds at or above hi.
    """
    if lo >= hi:
        raise ConfigError(f"dial range [{lo}, {hi}] is empty")
    if n_leds < 1:
        raise ConfigError(f"ring needs at least one LED, got {n_leds}")
    frac = (value - lo) / (hi - lo)
    frac = min(1.0, max(0.0, frac))
    return int(math.floor(n_leds * frac + 0.5))
