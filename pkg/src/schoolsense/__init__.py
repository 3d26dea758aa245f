"""School energy-awareness platform: sensor fleet simulation, gateway,
time-series storage, HTTP API, and the gamified challenge engine."""

__version__ = "0.1.0"
