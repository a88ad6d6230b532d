"""Benchmark environments: Bidirectional Diabolical Combination Lock and chain MDP."""
