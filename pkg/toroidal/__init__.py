"""Exact arithmetic for elementary log toroidal data."""

__version__ = "0.1.0"
