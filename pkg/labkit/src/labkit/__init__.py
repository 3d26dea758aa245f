"""Virtual lab-kit board: fetches live school data and renders a floorplan
with room LEDs, an LCD line and three LED-ring dials in the terminal."""

__version__ = "0.1.0"
