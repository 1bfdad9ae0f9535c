"""Tests for shiplabel-qi."""
