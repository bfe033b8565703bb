"""Exact vertex deletion to minor-free graphs, by dynamic programming on tree decompositions."""

__version__ = "0.1.0"
