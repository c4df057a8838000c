"""Simulator for one-time-pad and recyclable-key quantum communication protocols."""

__version__ = "0.1.0"
