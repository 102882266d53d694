"""Polarizer cascades, coincidence experiments and Bell limits under the
Malus description and a local hidden-variable response model."""

__version__ = "0.1.0"
