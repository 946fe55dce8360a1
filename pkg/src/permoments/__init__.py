"""Exact moments of sub-permanents for sums of random permutation matrices."""

__version__ = "0.1.0"
