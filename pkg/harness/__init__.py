"""Seeded multi-run experiment orchestration and scaled-reward aggregation."""
