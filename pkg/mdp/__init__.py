"""Finite-horizon tabular MDP representation and exact dynamic-programming solvers."""
