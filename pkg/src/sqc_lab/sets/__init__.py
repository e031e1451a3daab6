"""Convex sets: membership, distance, projection, spindles and ray probes."""
