"""Convex ropes of simple polygons by the method of multiple shooting."""

__version__ = "0.1.0"
