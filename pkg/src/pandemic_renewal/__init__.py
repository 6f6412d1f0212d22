"""Renewal-process models of rare event occurrence.

Two interarrival laws are covered: exponential gaps (a Poisson process) and
first-return times of the simple symmetric random walk, which have infinite
mean. Each comes with exact distributions, a seeded Monte Carlo cross-check,
and estimation from a record of event years.
"""

from . import data_ingest, exact_rw, poisson_model, renewal, stats

__version__ = "0.1.0"

__all__ = ["data_ingest", "exact_rw", "poisson_model", "renewal", "stats", "__version__"]
