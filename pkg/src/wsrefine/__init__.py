"""Refinement toolkit for wide-spectrum logic programs over finite universes."""

__version__ = "0.1.0"
