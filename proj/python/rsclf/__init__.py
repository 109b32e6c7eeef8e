"""Depression-screening text classifiers for Romanized Sinhala tweets."""

from ._rsclf import (
    FORMAT_VERSION,
    MODELS,
    DataError,
    NumericError,
    Pipeline,
    UsageError,
    benchmark,
    clean,
    default_config,
    load_csv,
    preprocess,
)

__all__ = [
    "FORMAT_VERSION",
    "MODELS",
    "DataError",
    "NumericError",
    "Pipeline",
    "UsageError",
    "benchmark",
    "clean",
    "default_config",
    "load_csv",
    "preprocess",
]
