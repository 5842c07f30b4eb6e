"""Tests for the topological Ramsey extraction package."""
