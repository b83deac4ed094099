"""Geospatially anchored handheld-AR engine."""

__version__ = "0.1.0"
