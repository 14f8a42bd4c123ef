"""Experiment presets."""
