"""Logging and reporting components."""
