"""Imputation Lab -- missing-data imputation library and benchmark harness."""

__version__ = "0.1.0"
