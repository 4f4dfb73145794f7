"""HTTP API for running imputation experiments on synthetic data."""
