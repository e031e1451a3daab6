"""Tests for LivePokerBench."""
