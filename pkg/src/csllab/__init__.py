"""Desk-scale numerical laboratory for continuous spontaneous localization dynamics."""

__version__ = "0.1.0"
