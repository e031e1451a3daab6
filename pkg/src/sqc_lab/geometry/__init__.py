"""Vectors, norms and deterministic sampling."""
