"""Planar network design toolkit."""

__version__ = "0.1.0"
