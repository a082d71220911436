"""Batch generation, evaluation, metrics, CLI, and the episode service."""

from .corpus import LoadedBundle, load_corpus, write_corpus  # noqa: F401
from .metrics import MetricsReport, aggregate, render_table  # noqa: F401
