"""Posterior-sampling tabular Q-learning agents (ReversedQ, RandomizedQ and ablations)."""
