"""Exact multiplicative Nambu structures on four-dimensional real Lie groups."""

__version__ = "0.1.0"
