"""Clipped-action policy gradient library and experiment runner."""
