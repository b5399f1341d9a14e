"""Tooling to build numeric-masked choice tuning datasets, mix low-rank
adapters and score multiple-choice benchmarks."""

__version__ = '1.0.0'
