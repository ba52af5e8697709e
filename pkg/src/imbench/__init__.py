"""Influence-maximization algorithms and a sound benchmarking harness."""

__version__ = "0.1.0"
