"""Coarse-geometry laboratory on the genus-2 surface group."""

__version__ = "0.1.0"
