"""Spectral datasets and report writers."""
