"""Executable checks of the strong quasiconvexity results."""
