"""Benchmark harness: experiment configs, replication runner, metrics,
CSV/figure emission and the command-line interface."""
