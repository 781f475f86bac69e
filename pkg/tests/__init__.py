"""Tests package for the graph PME verifier."""
