"""Exact constant-rank matrix spaces."""

__version__ = "0.1.0"
