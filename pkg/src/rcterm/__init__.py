"""Runtime complexity analysis for first-order term rewrite systems."""

__version__ = "0.1.0"
